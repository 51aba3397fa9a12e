/**
 * Browser persistence for the voter session.
 *
 * The client state (including the attribute m, the user decryption key
 * d and the device signing key) is stored in localStorage under the
 * same JSON schema the command-line tool writes to its state file.
 * That is a deliberate availability/security trade-off: localStorage
 * survives reloads but is readable by any script on this origin, so
 * the page must never include third-party scripts.  Clearing site data
 * irrevocably destroys the credential.
 */

import { stateFromJson, stateToJson, type ClientState } from "./client.js";

export interface AppConfig {
  authorities: string[];
  threshold: number | null;
  ownerUrl: string;
}

export class AppStorage {
  constructor(
    private readonly backend: Storage,
    private readonly namespace = "petition-webui",
  ) {}

  private key(name: string): string {
    return `${this.namespace}/${name}`;
  }

  loadState(): ClientState | null {
    const raw = this.backend.getItem(this.key("state"));
    if (raw === null) return null;
    try {
      return stateFromJson(JSON.parse(raw));
    } catch {
      return null;
    }
  }

  saveState(state: ClientState): void {
    this.backend.setItem(this.key("state"), JSON.stringify(stateToJson(state)));
  }

  loadConfig(): AppConfig | null {
    const raw = this.backend.getItem(this.key("config"));
    if (raw === null) return null;
    try {
      const data = JSON.parse(raw);
      return {
        authorities: Array.isArray(data.authorities) ? data.authorities : [],
        threshold: typeof data.threshold === "number" ? data.threshold : null,
        ownerUrl: typeof data.ownerUrl === "string" ? data.ownerUrl : "",
      };
    } catch {
      return null;
    }
  }

  saveConfig(config: AppConfig): void {
    this.backend.setItem(this.key("config"), JSON.stringify(config));
  }
}
