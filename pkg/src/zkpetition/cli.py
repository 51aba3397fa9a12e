"""Command-line driver for the whole protocol: voter commands (keygen,
request-cred, vote, result), the offline dealer, node servers, and the
operator's petition admin commands.

Exit codes: 0 success / final result, 2 pending, 1 protocol error,
64 usage error.
"""

import argparse
import json
import os
import sys

import requests

from . import credentials
from .client import (
    ClientError,
    admin_close_petition,
    admin_create_petition,
    cast_vote,
    get_result,
    load_state,
    new_state,
    request_credential,
    save_state,
)
from .groups import default_rng, scalar_from_bytes, scalar_to_bytes, setup
from .nodes import AuthorityNode, OwnerNode
from .nodes.httpd import make_server
from .wire import b64, unb64

CODE_OK = 0
CODE_PROTOCOL = 1
CODE_PENDING = 2
CODE_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        sys.exit(CODE_USAGE)


def _emit(args, human, payload):
    if getattr(args, "json", False):
        print(json.dumps(payload))
    else:
        print(human)


# -- voter commands -----------------------------------------------------------


def cmd_keygen(args):
    if os.path.exists(args.state) and not args.force:
        print(f"error: {args.state} exists (use --force to overwrite)",
              file=sys.stderr)
        return CODE_PROTOCOL
    state = new_state(default_rng(), security_tag=args.tag)
    save_state(args.state, state)
    _emit(args, f"new voter state written to {args.state}",
          {"status": "created", "state": args.state})
    return CODE_OK


def cmd_request_cred(args):
    state = load_state(args.state)
    state.authorities = [u.strip() for u in args.authorities.split(",") if u.strip()]
    state.threshold = args.threshold
    params = setup(state.security_tag)
    try:
        state = request_credential(params, state, default_rng())
    except ClientError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CODE_PROTOCOL
    save_state(args.state, state)
    _emit(args, "credential issued and verified",
          {"status": "issued", "authorities": len(state.authorities)})
    return CODE_OK


def cmd_vote(args):
    state = load_state(args.state)
    if state.credential is None:
        print("error: no credential in state; run request-cred first",
              file=sys.stderr)
        return CODE_PROTOCOL
    params = setup(state.security_tag)
    vote = 1 if args.choice == "yes" else 0
    try:
        code, body = cast_vote(params, state, args.owner, args.petition, vote,
                               default_rng())
    except (ClientError, requests.RequestException) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CODE_PROTOCOL
    if code == 200:
        _emit(args, f"vote {args.choice} accepted on {args.petition}", body)
        return CODE_OK
    if body.get("error") == "double_vote":
        _emit(args, "already voted on this petition", body)
    else:
        _emit(args, f"rejected: {body.get('error', code)}", body)
    return CODE_PROTOCOL


def cmd_result(args):
    try:
        code, body = get_result(args.owner, args.petition)
    except requests.RequestException as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CODE_PROTOCOL
    if code != 200:
        _emit(args, f"error: {body.get('error', code)}", body)
        return CODE_PROTOCOL
    if body["status"] == "pending":
        _emit(args, "pending", body)
        return CODE_PENDING
    _emit(args, f"yes {body['yes']} – no {body['no']}", body)
    return CODE_OK


# -- operator commands ---------------------------------------------------------


def cmd_dealer(args):
    params = setup(args.tag)
    try:
        signing, verify = credentials.ttp_keygen(params, args.threshold,
                                                 args.authorities, default_rng())
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CODE_USAGE
    os.makedirs(args.out, exist_ok=True)
    for sk in signing:
        path = os.path.join(args.out, f"authority-{sk.index}.key.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({
                "index": sk.index,
                "x": b64(scalar_to_bytes(sk.x)),
                "y": b64(scalar_to_bytes(sk.y)),
                "security_tag": args.tag,
            }, fh, indent=1)
        os.chmod(path, 0o600)
    bundle = {
        "threshold": args.threshold,
        "authorities": args.authorities,
        "security_tag": args.tag,
        "keys": [
            {
                "index": vk.index,
                "g2": b64(vk.g2.to_bytes()),
                "alpha": b64(vk.alpha.to_bytes()),
                "beta": b64(vk.beta.to_bytes()),
            }
            for vk in verify
        ],
    }
    with open(os.path.join(args.out, "public-keys.json"), "w", encoding="utf-8") as fh:
        json.dump(bundle, fh, indent=1)
    _emit(args, f"wrote {args.authorities} signing keys + public bundle to {args.out}",
          {"status": "ok", "out": args.out})
    return CODE_OK


def _load_config(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _split_listen(listen):
    host, _, port = listen.rpartition(":")
    return host or "127.0.0.1", int(port)


def cmd_authority_serve(args):
    try:
        config = _load_config(args.config)
        with open(config["signing_key"], encoding="utf-8") as fh:
            key_data = json.load(fh)
        sk = credentials.AuthoritySigningKey(
            key_data["index"],
            scalar_from_bytes(unb64(key_data["x"])),
            scalar_from_bytes(unb64(key_data["y"])),
        )
        params = setup(config.get("security_tag", "v1"))
        node = AuthorityNode(params, sk, config["data_dir"])
        host, port = _split_listen(config["listen"])
        server = make_server(node, host, port)
    except (OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
        print(f"startup failure: {exc}", file=sys.stderr)
        return CODE_PROTOCOL
    print(f"authority-{sk.index} listening on {host}:{server.server_address[1]}")
    server.serve_forever()
    return CODE_OK


def cmd_owner_serve(args):
    try:
        config = _load_config(args.config)
        params = setup(config.get("security_tag", "v1"))
        node = OwnerNode(params, config["authorities"], config["threshold"],
                         config["data_dir"])
        host, port = _split_listen(config["listen"])
        server = make_server(node, host, port)
    except (OSError, KeyError, ValueError, json.JSONDecodeError,
            ClientError) as exc:
        print(f"startup failure: {exc}", file=sys.stderr)
        return CODE_PROTOCOL
    print(f"owner listening on {host}:{server.server_address[1]}")
    server.serve_forever()
    return CODE_OK


def cmd_petition_create(args):
    try:
        code, body = admin_create_petition(args.owner, args.petition)
    except requests.RequestException as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CODE_PROTOCOL
    if code != 200:
        _emit(args, f"error: {body.get('error', code)}", body)
        return CODE_PROTOCOL
    _emit(args, f"petition {args.petition} created", body)
    return CODE_OK


def cmd_petition_close(args):
    try:
        code, body = admin_close_petition(args.owner, args.petition)
    except requests.RequestException as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CODE_PROTOCOL
    if code != 200:
        _emit(args, f"error: {body.get('error', code)}", body)
        return CODE_PROTOCOL
    _emit(args, f"final result: yes {body['yes']} – no {body['no']}", body)
    return CODE_OK


# -- wiring ---------------------------------------------------------------------


def _build_parser():
    parser = _Parser(prog="petition",
                     description="anonymous e-petition client and node runner")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="create a fresh voter state file")
    p.add_argument("--state", required=True)
    p.add_argument("--force", action="store_true")
    p.add_argument("--tag", default="v1")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("request-cred", help="obtain a threshold credential")
    p.add_argument("--state", required=True)
    p.add_argument("--authorities", required=True,
                   help="comma-separated authority base URLs")
    p.add_argument("--threshold", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_request_cred)

    p = sub.add_parser("vote", help="cast a yes/no vote on a petition")
    p.add_argument("--state", required=True)
    p.add_argument("--owner", required=True)
    p.add_argument("--petition", required=True)
    p.add_argument("--choice", choices=["yes", "no"], required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_vote)

    p = sub.add_parser("result", help="query a petition result")
    p.add_argument("--owner", required=True)
    p.add_argument("--petition", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_result)

    p = sub.add_parser("dealer", help="generate threshold authority keys")
    p.add_argument("--threshold", type=int, required=True)
    p.add_argument("--authorities", type=int, required=True,
                   help="number of authorities")
    p.add_argument("--out", required=True)
    p.add_argument("--tag", default="v1")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_dealer)

    authority = sub.add_parser("authority", help="authority node commands")
    asub = authority.add_subparsers(dest="subcommand", required=True)
    p = asub.add_parser("serve", help="run an authority node")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_authority_serve)

    owner = sub.add_parser("owner", help="owner node commands")
    osub = owner.add_subparsers(dest="subcommand", required=True)
    p = osub.add_parser("serve", help="run the petition owner node")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_owner_serve)

    p = sub.add_parser("create-petition", help="open a new petition (admin)")
    p.add_argument("--owner", required=True)
    p.add_argument("--petition", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_petition_create)

    p = sub.add_parser("close-petition",
                       help="close a petition and run the tally (admin)")
    p.add_argument("--owner", required=True)
    p.add_argument("--petition", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_petition_close)

    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
