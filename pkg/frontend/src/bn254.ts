/**
 * Low-level arithmetic for the BN254 pairing curve (the curve used by
 * Ethereum's precompiles, also known as alt_bn128), on native bigints.
 *
 * Field elements are bigints or nested tuples of bigints kept reduced
 * into [0, P); curve points are affine [x, y] tuples with null as the
 * point at infinity.  The typed, serialization-aware API lives in
 * groups.ts.
 *
 * Tower construction:
 *
 *     Fp2  = Fp[i]  / (i^2 + 1)
 *     Fp6  = Fp2[v] / (v^3 - xi),  xi = 9 + i
 *     Fp12 = Fp6[w] / (w^2 - v)
 *
 * G1 is the curve y^2 = x^3 + 3 over Fp (prime order, cofactor 1).  G2
 * is the order-r subgroup of the D-type sextic twist y^2 = x^3 + 3/xi
 * over Fp2.  The pairing is the optimal ate pairing with affine
 * Miller-loop steps.
 */

// BN parameter; P, R follow from the standard BN polynomial in u.
export const U = 4965661367192848881n;
export const P = 36n * U ** 4n + 36n * U ** 3n + 24n * U ** 2n + 6n * U + 1n;
export const R = 36n * U ** 4n + 36n * U ** 3n + 18n * U ** 2n + 6n * U + 1n;
const B = 3n;

if (P !== 21888242871839275222246405745257275088696311157297823662689037894645226208583n
  || R !== 21888242871839275222246405745257275088548364400416034343698204186575808495617n) {
  throw new Error("BN parameter derivation is wrong");
}

export type Fp2 = readonly [bigint, bigint];
export type Fp6 = readonly [Fp2, Fp2, Fp2];
export type Fp12 = readonly [Fp6, Fp6];
export type G1 = readonly [bigint, bigint] | null;
export type G2 = readonly [Fp2, Fp2] | null;

export const G1_GEN: G1 = [1n, 2n];

// Twist generator, coordinates as (real, imag) pairs.
export const G2_GEN: G2 = [
  [
    10857046999023057135944570762232829481370756359578518086990519993285655852781n,
    11559732032986387107991004021392285783925812861821192530917403151452391805634n,
  ],
  [
    8495653923123431417604973247489272438418190587263600148770280649306958101930n,
    4082367875863433681332203403145435568316851327593401208105741076214120093531n,
  ],
];

/** Always-nonnegative remainder, matching Python's % semantics. */
export function mod(a: bigint, m: bigint): bigint {
  const r = a % m;
  return r < 0n ? r + m : r;
}

/** Modular inverse by the extended Euclidean algorithm. */
export function invMod(a: bigint, m: bigint): bigint {
  let t = 0n, newT = 1n;
  let r = m, newR = mod(a, m);
  while (newR !== 0n) {
    const q = r / newR;
    [t, newT] = [newT, t - q * newT];
    [r, newR] = [newR, r - q * newR];
  }
  if (r !== 1n) throw new Error("not invertible");
  return mod(t, m);
}

export function powMod(base: bigint, exp: bigint, m: bigint): bigint {
  let result = 1n;
  let b = mod(base, m);
  let e = exp;
  while (e > 0n) {
    if (e & 1n) result = (result * b) % m;
    b = (b * b) % m;
    e >>= 1n;
  }
  return result;
}

export const fpInv = (a: bigint): bigint => invMod(mod(a, P), P);
export const scalarInv = (a: bigint): bigint => invMod(mod(a, R), R);

// ---------------------------------------------------------------------------
// Fp2
// ---------------------------------------------------------------------------

export const FP2_ZERO: Fp2 = [0n, 0n];
export const FP2_ONE: Fp2 = [1n, 0n];

export const fp2 = (a: bigint, b: bigint = 0n): Fp2 => [mod(a, P), mod(b, P)];

export const fp2Eq = (a: Fp2, b: Fp2): boolean => a[0] === b[0] && a[1] === b[1];

export const fp2Add = (a: Fp2, b: Fp2): Fp2 =>
  [mod(a[0] + b[0], P), mod(a[1] + b[1], P)];

export const fp2Sub = (a: Fp2, b: Fp2): Fp2 =>
  [mod(a[0] - b[0], P), mod(a[1] - b[1], P)];

export const fp2Neg = (a: Fp2): Fp2 => [mod(-a[0], P), mod(-a[1], P)];

export const fp2Conj = (a: Fp2): Fp2 => [a[0], mod(-a[1], P)];

export function fp2Mul(a: Fp2, b: Fp2): Fp2 {
  const m0 = a[0] * b[0];
  const m1 = a[1] * b[1];
  return [mod(m0 - m1, P), mod((a[0] + a[1]) * (b[0] + b[1]) - m0 - m1, P)];
}

export function fp2Sqr(a: Fp2): Fp2 {
  return [mod((a[0] + a[1]) * (a[0] - a[1]), P), mod(2n * a[0] * a[1], P)];
}

/** Multiply by a plain Fp scalar. */
export const fp2Smul = (a: Fp2, k: bigint): Fp2 =>
  [mod(a[0] * k, P), mod(a[1] * k, P)];

export function fp2Inv(a: Fp2): Fp2 {
  const d = invMod(mod(a[0] * a[0] + a[1] * a[1], P), P);
  return [mod(a[0] * d, P), mod(-a[1] * d, P)];
}

export function fp2Pow(a: Fp2, e: bigint): Fp2 {
  let result = FP2_ONE;
  let base = a;
  let k = e;
  while (k > 0n) {
    if (k & 1n) result = fp2Mul(result, base);
    base = fp2Sqr(base);
    k >>= 1n;
  }
  return result;
}

export const XI: Fp2 = fp2(9n, 1n);

export const fp2MulXi = (a: Fp2): Fp2 =>
  [mod(9n * a[0] - a[1], P), mod(9n * a[1] + a[0], P)];

// ---------------------------------------------------------------------------
// Fp6 / Fp12
// ---------------------------------------------------------------------------

export const FP6_ZERO: Fp6 = [FP2_ZERO, FP2_ZERO, FP2_ZERO];
export const FP6_ONE: Fp6 = [FP2_ONE, FP2_ZERO, FP2_ZERO];

const fp6Add = (a: Fp6, b: Fp6): Fp6 =>
  [fp2Add(a[0], b[0]), fp2Add(a[1], b[1]), fp2Add(a[2], b[2])];

const fp6Sub = (a: Fp6, b: Fp6): Fp6 =>
  [fp2Sub(a[0], b[0]), fp2Sub(a[1], b[1]), fp2Sub(a[2], b[2])];

const fp6Neg = (a: Fp6): Fp6 => [fp2Neg(a[0]), fp2Neg(a[1]), fp2Neg(a[2])];

function fp6Mul(a: Fp6, b: Fp6): Fp6 {
  const [a0, a1, a2] = a;
  const [b0, b1, b2] = b;
  const m0 = fp2Mul(a0, b0);
  const m1 = fp2Mul(a1, b1);
  const m2 = fp2Mul(a2, b2);
  let t = fp2Mul(fp2Add(a1, a2), fp2Add(b1, b2));
  const c0 = fp2Add(m0, fp2MulXi(fp2Sub(fp2Sub(t, m1), m2)));
  t = fp2Mul(fp2Add(a0, a1), fp2Add(b0, b1));
  const c1 = fp2Add(fp2Sub(fp2Sub(t, m0), m1), fp2MulXi(m2));
  t = fp2Mul(fp2Add(a0, a2), fp2Add(b0, b2));
  const c2 = fp2Add(fp2Sub(fp2Sub(t, m0), m2), m1);
  return [c0, c1, c2];
}

const fp6Sqr = (a: Fp6): Fp6 => fp6Mul(a, a);

/** Multiply by v (the Fp6 generator): shifts coefficients. */
const fp6MulV = (a: Fp6): Fp6 => [fp2MulXi(a[2]), a[0], a[1]];

function fp6Inv(a: Fp6): Fp6 {
  const [a0, a1, a2] = a;
  const c0 = fp2Sub(fp2Sqr(a0), fp2MulXi(fp2Mul(a1, a2)));
  const c1 = fp2Sub(fp2MulXi(fp2Sqr(a2)), fp2Mul(a0, a1));
  const c2 = fp2Sub(fp2Sqr(a1), fp2Mul(a0, a2));
  const t = fp2Add(
    fp2Mul(a0, c0),
    fp2MulXi(fp2Add(fp2Mul(a2, c1), fp2Mul(a1, c2))),
  );
  const tinv = fp2Inv(t);
  return [fp2Mul(c0, tinv), fp2Mul(c1, tinv), fp2Mul(c2, tinv)];
}

export const FP12_ONE: Fp12 = [FP6_ONE, FP6_ZERO];

export function fp12Mul(a: Fp12, b: Fp12): Fp12 {
  const m0 = fp6Mul(a[0], b[0]);
  const m1 = fp6Mul(a[1], b[1]);
  const c0 = fp6Add(m0, fp6MulV(m1));
  const c1 = fp6Sub(fp6Sub(fp6Mul(fp6Add(a[0], a[1]), fp6Add(b[0], b[1])), m0), m1);
  return [c0, c1];
}

export function fp12Sqr(a: Fp12): Fp12 {
  const m = fp6Mul(a[0], a[1]);
  const t = fp6Mul(fp6Add(a[0], a[1]), fp6Add(a[0], fp6MulV(a[1])));
  const c0 = fp6Sub(fp6Sub(t, m), fp6MulV(m));
  const c1 = fp6Add(m, m);
  return [c0, c1];
}

/** Conjugation over Fp6, i.e. the p^6 Frobenius. */
export const fp12Conj = (a: Fp12): Fp12 => [a[0], fp6Neg(a[1])];

export function fp12Inv(a: Fp12): Fp12 {
  const t = fp6Inv(fp6Sub(fp6Sqr(a[0]), fp6MulV(fp6Sqr(a[1]))));
  return [fp6Mul(a[0], t), fp6Neg(fp6Mul(a[1], t))];
}

export function fp12Eq(a: Fp12, b: Fp12): boolean {
  for (let h = 0; h < 2; h++) {
    for (let j = 0; j < 3; j++) {
      if (!fp2Eq(a[h][j], b[h][j])) return false;
    }
  }
  return true;
}

// Frobenius constants: v^p = XI_P13 * v, w^p = XI_P16 * w (after
// conjugating the Fp2 coefficients).  Derived once at import instead of
// hardcoded.
const XI_P13 = fp2Pow(XI, (P - 1n) / 3n);
const XI_P23 = fp2Sqr(XI_P13);
const XI_P16 = fp2Pow(XI, (P - 1n) / 6n);
const XI_P12 = fp2Mul(XI_P13, XI_P16);

// pi^2 acts on twist coordinates by Fp constants.
const XI_P2_13 = fp2Mul(XI_P13, fp2Conj(XI_P13));
const XI_P2_12 = fp2Mul(XI_P12, fp2Conj(XI_P12));

const fp6Frob = (a: Fp6): Fp6 => [
  fp2Conj(a[0]),
  fp2Mul(fp2Conj(a[1]), XI_P13),
  fp2Mul(fp2Conj(a[2]), XI_P23),
];

function fp12Frob(a: Fp12): Fp12 {
  const c0 = fp6Frob(a[0]);
  const t = fp6Frob(a[1]);
  const c1: Fp6 = [fp2Mul(t[0], XI_P16), fp2Mul(t[1], XI_P16), fp2Mul(t[2], XI_P16)];
  return [c0, c1];
}

function fp12FrobN(a: Fp12, n: number): Fp12 {
  let out = a;
  for (let i = 0; i < n; i++) out = fp12Frob(out);
  return out;
}

// ---------------------------------------------------------------------------
// G1: y^2 = x^3 + 3 over Fp, affine with null at infinity
// ---------------------------------------------------------------------------

export function g1IsOnCurve(pt: G1): boolean {
  if (pt === null) return true;
  const [x, y] = pt;
  return mod(y * y - (x * x * x + B), P) === 0n;
}

export function g1Neg(pt: G1): G1 {
  if (pt === null) return null;
  return [pt[0], mod(-pt[1], P)];
}

export function g1Add(p1: G1, p2: G1): G1 {
  if (p1 === null) return p2;
  if (p2 === null) return p1;
  const [x1, y1] = p1;
  const [x2, y2] = p2;
  if (x1 === x2) {
    if (mod(y1 + y2, P) === 0n) return null;
    return g1Double(p1);
  }
  const lam = mod((y2 - y1) * invMod(mod(x2 - x1, P), P), P);
  const x3 = mod(lam * lam - x1 - x2, P);
  return [x3, mod(lam * (x1 - x3) - y1, P)];
}

export function g1Double(p1: G1): G1 {
  if (p1 === null) return null;
  const [x1, y1] = p1;
  const lam = mod(3n * x1 * x1 * invMod(mod(2n * y1, P), P), P);
  const x3 = mod(lam * lam - 2n * x1, P);
  return [x3, mod(lam * (x1 - x3) - y1, P)];
}

type Jac1 = [bigint, bigint, bigint];

function g1JacDouble(pt: Jac1): Jac1 {
  const [X1, Y1, Z1] = pt;
  const A = mod(X1 * X1, P);
  const Bv = mod(Y1 * Y1, P);
  const C = mod(Bv * Bv, P);
  const t = X1 + Bv;
  const D = mod(2n * (t * t - A - C), P);
  const E = mod(3n * A, P);
  const F = mod(E * E, P);
  const X3 = mod(F - 2n * D, P);
  const Y3 = mod(E * (D - X3) - 8n * C, P);
  const Z3 = mod(2n * Y1 * Z1, P);
  return [X3, Y3, Z3];
}

function g1JacAdd(p1: Jac1, p2: Jac1): Jac1 {
  const [X1, Y1, Z1] = p1;
  const [X2, Y2, Z2] = p2;
  if (Z1 === 0n) return p2;
  if (Z2 === 0n) return p1;
  const Z1Z1 = mod(Z1 * Z1, P);
  const Z2Z2 = mod(Z2 * Z2, P);
  const U1 = mod(X1 * Z2Z2, P);
  const U2 = mod(X2 * Z1Z1, P);
  const S1 = mod(Y1 * Z2 * Z2Z2, P);
  const S2 = mod(Y2 * Z1 * Z1Z1, P);
  const H = mod(U2 - U1, P);
  const rr = mod(2n * (S2 - S1), P);
  if (H === 0n) {
    if (rr === 0n) return g1JacDouble(p1);
    return [0n, 1n, 0n];
  }
  const I = mod(4n * H * H, P);
  const J = mod(H * I, P);
  const V = mod(U1 * I, P);
  const X3 = mod(rr * rr - J - 2n * V, P);
  const Y3 = mod(rr * (V - X3) - 2n * S1 * J, P);
  const t = Z1 + Z2;
  const Z3 = mod((t * t - Z1Z1 - Z2Z2) * H, P);
  return [X3, Y3, Z3];
}

export function g1Mul(pt: G1, k: bigint): G1 {
  const e = mod(k, R);
  if (pt === null || e === 0n) return null;
  let acc: Jac1 = [0n, 1n, 0n];
  const base: Jac1 = [pt[0], pt[1], 1n];
  for (const bit of e.toString(2)) {
    acc = g1JacDouble(acc);
    if (bit === "1") acc = g1JacAdd(acc, base);
  }
  const [X, Y, Z] = acc;
  if (Z === 0n) return null;
  const zi = invMod(Z, P);
  const zi2 = mod(zi * zi, P);
  return [mod(X * zi2, P), mod(Y * zi2 * zi, P)];
}

// ---------------------------------------------------------------------------
// G2: points on the twist over Fp2
// ---------------------------------------------------------------------------

export const TWIST_B: Fp2 = fp2Mul(fp2(3n, 0n), fp2Inv(XI));

export function g2IsOnTwist(pt: G2): boolean {
  if (pt === null) return true;
  const [x, y] = pt;
  const lhs = fp2Sqr(y);
  const rhs = fp2Add(fp2Mul(fp2Sqr(x), x), TWIST_B);
  return fp2Eq(lhs, rhs);
}

export function g2Neg(pt: G2): G2 {
  if (pt === null) return null;
  return [pt[0], fp2Neg(pt[1])];
}

export function g2Add(p1: G2, p2: G2): G2 {
  if (p1 === null) return p2;
  if (p2 === null) return p1;
  const [x1, y1] = p1;
  const [x2, y2] = p2;
  if (fp2Eq(x1, x2)) {
    if (fp2Eq(fp2Add(y1, y2), FP2_ZERO)) return null;
    return g2Double(p1);
  }
  const lam = fp2Mul(fp2Sub(y2, y1), fp2Inv(fp2Sub(x2, x1)));
  const x3 = fp2Sub(fp2Sub(fp2Sqr(lam), x1), x2);
  return [x3, fp2Sub(fp2Mul(lam, fp2Sub(x1, x3)), y1)];
}

export function g2Double(p1: G2): G2 {
  if (p1 === null) return null;
  const [x1, y1] = p1;
  const lam = fp2Mul(fp2Smul(fp2Sqr(x1), 3n), fp2Inv(fp2Smul(y1, 2n)));
  const x3 = fp2Sub(fp2Sqr(lam), fp2Smul(x1, 2n));
  return [x3, fp2Sub(fp2Mul(lam, fp2Sub(x1, x3)), y1)];
}

type Jac2 = [Fp2, Fp2, Fp2];

function g2JacDouble(pt: Jac2): Jac2 {
  const [X1, Y1, Z1] = pt;
  const A = fp2Sqr(X1);
  const Bv = fp2Sqr(Y1);
  const C = fp2Sqr(Bv);
  const t = fp2Add(X1, Bv);
  const D = fp2Smul(fp2Sub(fp2Sub(fp2Sqr(t), A), C), 2n);
  const E = fp2Smul(A, 3n);
  const F = fp2Sqr(E);
  const X3 = fp2Sub(F, fp2Smul(D, 2n));
  const Y3 = fp2Sub(fp2Mul(E, fp2Sub(D, X3)), fp2Smul(C, 8n));
  const Z3 = fp2Smul(fp2Mul(Y1, Z1), 2n);
  return [X3, Y3, Z3];
}

function g2JacAdd(p1: Jac2, p2: Jac2): Jac2 {
  const [X1, Y1, Z1] = p1;
  const [X2, Y2, Z2] = p2;
  if (fp2Eq(Z1, FP2_ZERO)) return p2;
  if (fp2Eq(Z2, FP2_ZERO)) return p1;
  const Z1Z1 = fp2Sqr(Z1);
  const Z2Z2 = fp2Sqr(Z2);
  const U1 = fp2Mul(X1, Z2Z2);
  const U2 = fp2Mul(X2, Z1Z1);
  const S1 = fp2Mul(fp2Mul(Y1, Z2), Z2Z2);
  const S2 = fp2Mul(fp2Mul(Y2, Z1), Z1Z1);
  const H = fp2Sub(U2, U1);
  const rr = fp2Smul(fp2Sub(S2, S1), 2n);
  if (fp2Eq(H, FP2_ZERO)) {
    if (fp2Eq(rr, FP2_ZERO)) return g2JacDouble(p1);
    return [FP2_ZERO, FP2_ONE, FP2_ZERO];
  }
  const I = fp2Smul(fp2Sqr(H), 4n);
  const J = fp2Mul(H, I);
  const V = fp2Mul(U1, I);
  const X3 = fp2Sub(fp2Sub(fp2Sqr(rr), J), fp2Smul(V, 2n));
  const Y3 = fp2Sub(fp2Mul(rr, fp2Sub(V, X3)), fp2Smul(fp2Mul(S1, J), 2n));
  const t = fp2Add(Z1, Z2);
  const Z3 = fp2Mul(fp2Sub(fp2Sub(fp2Sqr(t), Z1Z1), Z2Z2), H);
  return [X3, Y3, Z3];
}

export function g2Mul(pt: G2, k: bigint): G2 {
  const e = mod(k, R);
  if (pt === null || e === 0n) return null;
  let acc: Jac2 = [FP2_ZERO, FP2_ONE, FP2_ZERO];
  const base: Jac2 = [pt[0], pt[1], FP2_ONE];
  for (const bit of e.toString(2)) {
    acc = g2JacDouble(acc);
    if (bit === "1") acc = g2JacAdd(acc, base);
  }
  const [X, Y, Z] = acc;
  if (fp2Eq(Z, FP2_ZERO)) return null;
  const zi = fp2Inv(Z);
  const zi2 = fp2Sqr(zi);
  return [fp2Mul(X, zi2), fp2Mul(Y, fp2Mul(zi2, zi))];
}

export function g2Eq(a: G2, b: G2): boolean {
  if (a === null || b === null) return a === b;
  return fp2Eq(a[0], b[0]) && fp2Eq(a[1], b[1]);
}

export function g2InSubgroup(pt: G2): boolean {
  // The twist has composite order; membership needs the full check.
  // g2Mul reduces its scalar mod R, so R itself cannot be used
  // directly; (R-1)*P == -P is the same predicate as R*P == O.
  return g2IsOnTwist(pt) && g2Eq(g2Mul(pt, R - 1n), g2Neg(pt));
}

// ---------------------------------------------------------------------------
// Optimal ate pairing
// ---------------------------------------------------------------------------

function naf(k: bigint): number[] {
  const digits: number[] = [];
  let x = k;
  while (x > 0n) {
    let d = 0;
    if (x & 1n) {
      d = Number(2n - mod(x, 4n));
      x -= BigInt(d);
    }
    digits.push(d);
    x >>= 1n;
  }
  digits.reverse();
  return digits;
}

const ATE_LOOP_NAF = naf(6n * U + 2n);

/**
 * Line of slope lam through twist point T, evaluated at [xp, yp].
 *
 * With the untwist (x, y) -> (x*v, y*v*w) the value is
 * yp - (lam*xp)*w + (lam*x_T - y_T)*v*w, sparse in the Fp12 tower.
 */
function line(T: readonly [Fp2, Fp2], lam: Fp2, xp: bigint, yp: bigint): Fp12 {
  const [x1, y1] = T;
  const c0: Fp6 = [[yp, 0n], FP2_ZERO, FP2_ZERO];
  const c1: Fp6 = [fp2Neg(fp2Smul(lam, xp)), fp2Sub(fp2Mul(lam, x1), y1), FP2_ZERO];
  return [c0, c1];
}

function dblStep(T: readonly [Fp2, Fp2], xp: bigint, yp: bigint):
    [readonly [Fp2, Fp2], Fp12] {
  const [x1, y1] = T;
  const lam = fp2Mul(fp2Smul(fp2Sqr(x1), 3n), fp2Inv(fp2Smul(y1, 2n)));
  const ln = line(T, lam, xp, yp);
  const x3 = fp2Sub(fp2Sqr(lam), fp2Smul(x1, 2n));
  const y3 = fp2Sub(fp2Mul(lam, fp2Sub(x1, x3)), y1);
  return [[x3, y3], ln];
}

function addStep(T: readonly [Fp2, Fp2], Q: readonly [Fp2, Fp2],
                 xp: bigint, yp: bigint): [readonly [Fp2, Fp2], Fp12] {
  const [x1, y1] = T;
  const [x2, y2] = Q;
  const lam = fp2Mul(fp2Sub(y2, y1), fp2Inv(fp2Sub(x2, x1)));
  const ln = line(T, lam, xp, yp);
  const x3 = fp2Sub(fp2Sub(fp2Sqr(lam), x1), x2);
  const y3 = fp2Sub(fp2Mul(lam, fp2Sub(x1, x3)), y1);
  return [[x3, y3], ln];
}

const twistFrob = (pt: readonly [Fp2, Fp2]): readonly [Fp2, Fp2] =>
  [fp2Mul(fp2Conj(pt[0]), XI_P13), fp2Mul(fp2Conj(pt[1]), XI_P12)];

const twistFrob2 = (pt: readonly [Fp2, Fp2]): readonly [Fp2, Fp2] =>
  [fp2Mul(pt[0], XI_P2_13), fp2Mul(pt[1], XI_P2_12)];

export function millerLoop(p1: G1, q2: G2): Fp12 {
  if (p1 === null || q2 === null) return FP12_ONE;
  const [xp, yp] = p1;
  let T = q2;
  let f = FP12_ONE;
  const negQ = g2Neg(q2) as readonly [Fp2, Fp2];
  for (let i = 1; i < ATE_LOOP_NAF.length; i++) {
    f = fp12Sqr(f);
    let ln: Fp12;
    [T, ln] = dblStep(T, xp, yp);
    f = fp12Mul(f, ln);
    const d = ATE_LOOP_NAF[i];
    if (d === 1) {
      [T, ln] = addStep(T, q2, xp, yp);
      f = fp12Mul(f, ln);
    } else if (d === -1) {
      [T, ln] = addStep(T, negQ, xp, yp);
      f = fp12Mul(f, ln);
    }
  }
  const q1 = twistFrob(q2);
  const q2f = g2Neg(twistFrob2(q2)) as readonly [Fp2, Fp2];
  let ln: Fp12;
  [T, ln] = addStep(T, q1, xp, yp);
  f = fp12Mul(f, ln);
  [, ln] = addStep(T, q2f, xp, yp);
  return fp12Mul(f, ln);
}

// Hard part of the final exponentiation, decomposed in base p so the
// Frobenius replaces three quarters of the square-and-multiply work.
const HARD_EXP = (P ** 4n - P ** 2n + 1n) / R;
if ((P ** 4n - P ** 2n + 1n) % R !== 0n) {
  throw new Error("hard exponent must divide exactly");
}
const HARD_DIGITS: bigint[] = [];
{
  let d = HARD_EXP;
  while (d > 0n) {
    HARD_DIGITS.push(mod(d, P));
    d /= P;
  }
  if (HARD_DIGITS.length > 4) throw new Error("unexpected digit count");
}

const bitLength = (x: bigint): number => (x === 0n ? 0 : x.toString(2).length);

function hardPart(f: Fp12): Fp12 {
  const ys: Fp12[] = [f];
  for (let i = 0; i < HARD_DIGITS.length - 1; i++) {
    ys.push(fp12Frob(ys[ys.length - 1]));
  }
  const table = new Map<number, Fp12>();
  for (let mask = 1; mask < 1 << ys.length; mask++) {
    let acc: Fp12 | null = null;
    for (let i = 0; i < ys.length; i++) {
      if ((mask >> i) & 1) acc = acc === null ? ys[i] : fp12Mul(acc, ys[i]);
    }
    table.set(mask, acc as Fp12);
  }
  const bits = Math.max(...HARD_DIGITS.map(bitLength));
  let res = FP12_ONE;
  for (let pos = bits - 1; pos >= 0; pos--) {
    res = fp12Sqr(res);
    let mask = 0;
    for (let i = 0; i < HARD_DIGITS.length; i++) {
      if ((HARD_DIGITS[i] >> BigInt(pos)) & 1n) mask |= 1 << i;
    }
    if (mask) res = fp12Mul(res, table.get(mask) as Fp12);
  }
  return res;
}

export function finalExponentiation(f: Fp12): Fp12 {
  let t = fp12Mul(fp12Conj(f), fp12Inv(f)); // ^(p^6 - 1)
  t = fp12Mul(fp12FrobN(t, 2), t); // ^(p^2 + 1)
  return hardPart(t);
}

/** Full pairing e(p1, q2); inputs are affine G1/twist points or null. */
export function pairing(p1: G1, q2: G2): Fp12 {
  return finalExponentiation(millerLoop(p1, q2));
}

// ---------------------------------------------------------------------------
// Square roots (for hashing onto G1)
// ---------------------------------------------------------------------------

if (mod(P, 4n) !== 3n) throw new Error("sqrt exponent needs P = 3 mod 4");
const SQRT_EXP = (P + 1n) / 4n;

/** Square root mod P, or null if a is a non-residue. */
export function fpSqrt(a: bigint): bigint | null {
  const x = mod(a, P);
  const y = powMod(x, SQRT_EXP, P);
  if ((y * y) % P !== x) return null;
  return y;
}

// Sanity anchors for the twist constants: generator must lie in the
// order-R subgroup and the Frobenius must map it within the twist.
if (!g1IsOnCurve(G1_GEN)
  || !g2IsOnTwist(G2_GEN)
  || !g2IsOnTwist(twistFrob(G2_GEN as readonly [Fp2, Fp2]))
  || !g2IsOnTwist(twistFrob2(G2_GEN as readonly [Fp2, Fp2]))) {
  throw new Error("curve constants failed self-check");
}
