/**
 * Client-side validation of remp scenario files, mirroring the CLI's schema:
 * unknown keys are rejected, expressions are parsed with the slot's free
 * variable, and per-system applicability (components, couplings, channels,
 * invariants) is enforced. A config that passes here is accepted by
 * `remp simulate` and friends, short of runtime physics guards.
 */

import { ConfigError, ExprError } from "./errors.js";
import { parse } from "./expr.js";

export const SYSTEM_IDS = [
  "NR_OSC_2D",
  "NR_EMP",
  "NR_RR",
  "REL_OSC_2D",
  "REL_EMP",
  "REL_RR",
  "REL_1D",
] as const;

export type SystemId = (typeof SYSTEM_IDS)[number];

export const STATE_COMPONENTS: Record<SystemId, readonly string[]> = {
  NR_OSC_2D: ["x", "y", "vx", "vy"],
  NR_EMP: ["x", "vx", "rho", "rhodot"],
  NR_RR: ["x", "y", "vx", "vy"],
  REL_OSC_2D: ["x", "y", "vx", "vy"],
  REL_EMP: ["x", "vx", "rho", "rhodot"],
  REL_RR: ["x", "y", "vx", "vy"],
  REL_1D: ["x", "v"],
};

const RR_IDS: readonly SystemId[] = ["NR_RR", "REL_RR"];

export const CHANNELS: Record<string, readonly SystemId[]> = {
  accum_T: ["NR_EMP", "REL_EMP"],
  theta: ["NR_EMP", "REL_EMP"],
  accum_t_of_tau: ["NR_OSC_2D", "NR_RR"],
};

export const INVARIANTS: Record<string, readonly SystemId[]> = {
  I: ["NR_EMP", "NR_OSC_2D"],
  I_R: ["REL_EMP", "REL_OSC_2D"],
  I_RR: ["NR_RR"],
  I_RRR: ["REL_RR"],
  H1D: ["REL_1D"],
  H: ["REL_EMP"],
  H_full: ["REL_OSC_2D"],
};

const KAPPA_BOUND_INVARIANTS = new Set(["H", "H1D"]);

type Json = unknown;

function isObject(v: Json): v is Record<string, Json> {
  return typeof v === "object" && v !== null && !Array.isArray(v);
}

function checkKeys(obj: Record<string, Json>, allowed: readonly string[], where: string): void {
  const unknown = Object.keys(obj).filter((k) => !allowed.includes(k)).sort();
  if (unknown.length > 0) {
    throw new ConfigError(
      `${where}: unknown key(s) [${unknown.join(", ")}]; allowed: [${[...allowed].sort().join(", ")}]`,
    );
  }
}

function getNumber(
  obj: Record<string, Json>,
  key: string,
  where: string,
  fallback?: number,
): number {
  if (!(key in obj)) {
    if (fallback === undefined) {
      throw new ConfigError(`${where}: missing required key '${key}'`);
    }
    return fallback;
  }
  const v = obj[key];
  if (typeof v !== "number" || Number.isNaN(v)) {
    throw new ConfigError(`${where}.${key}: expected a number`);
  }
  return v;
}

function getString(
  obj: Record<string, Json>,
  key: string,
  where: string,
  fallback?: string,
): string {
  if (!(key in obj)) {
    if (fallback === undefined) {
      throw new ConfigError(`${where}: missing required key '${key}'`);
    }
    return fallback;
  }
  const v = obj[key];
  if (typeof v !== "string") {
    throw new ConfigError(`${where}.${key}: expected a string`);
  }
  return v;
}

/** A validated coefficient slot: constant or expression (kept as text). */
export interface CoefficientSpec {
  constant: number | null;
  expression: string | null;
}

function coefficient(
  obj: Record<string, Json>,
  key: string,
  variable: string,
  where: string,
): CoefficientSpec {
  if (!(key in obj)) {
    throw new ConfigError(`${where}: missing required key '${key}'`);
  }
  const v = obj[key];
  if (typeof v === "number" && !Number.isNaN(v)) {
    return { constant: v, expression: null };
  }
  if (typeof v === "string") {
    try {
      parse(v, variable);
    } catch (err) {
      if (err instanceof ExprError) {
        throw new ConfigError(`${where}.${key}: ${err.message}`);
      }
      throw err;
    }
    return { constant: null, expression: v };
  }
  throw new ConfigError(`${where}.${key}: expected a number or expression string`);
}

function couplingExpression(
  obj: Record<string, Json>,
  key: string,
  where: string,
): string | null {
  if (!(key in obj) || obj[key] === null) return null;
  const v = obj[key];
  if (typeof v !== "string") {
    throw new ConfigError(`${where}.${key}: expected an expression string`);
  }
  try {
    parse(v, "s");
  } catch (err) {
    if (err instanceof ExprError) {
      throw new ConfigError(`${where}.${key}: ${err.message}`);
    }
    throw err;
  }
  return v;
}

export interface Params {
  c: number;
  J: number;
  Cemp: number | null;
}

function params(obj: Record<string, Json>, where: string): Params {
  const raw = obj["params"] ?? {};
  if (!isObject(raw)) throw new ConfigError(`${where}.params: expected an object`);
  checkKeys(raw, ["c", "J", "Cemp"], `${where}.params`);
  const c = getNumber(raw, "c", `${where}.params`, 1.0);
  if (c <= 0) throw new ConfigError(`${where}.params.c must be positive, got ${c}`);
  const J = getNumber(raw, "J", `${where}.params`, 0.0);
  const cemp = raw["Cemp"] == null ? null : getNumber(raw, "Cemp", `${where}.params`);
  return { c, J, Cemp: cemp };
}

export interface IntegratorSettings {
  method: "rk45" | "rk4";
  rtol: number;
  atol: number;
  maxStep: number | null;
  tEnd: number;
  sampleDt: number;
}

function integrator(obj: Record<string, Json>, where: string): IntegratorSettings {
  const raw = obj["integrator"];
  if (!isObject(raw)) throw new ConfigError(`${where}: missing required key 'integrator'`);
  const w = `${where}.integrator`;
  checkKeys(raw, ["method", "rtol", "atol", "max_step", "t_end", "sample_dt"], w);
  const method = getString(raw, "method", w, "rk45");
  if (method !== "rk45" && method !== "rk4") {
    throw new ConfigError(`${w}.method: 'rk45' or 'rk4', got '${method}'`);
  }
  const rtol = getNumber(raw, "rtol", w, 1e-10);
  const atol = getNumber(raw, "atol", w, 1e-12);
  if (rtol <= 0 || atol <= 0) throw new ConfigError(`${w}: rtol and atol must be positive`);
  const maxStep = raw["max_step"] == null ? null : getNumber(raw, "max_step", w);
  if (maxStep !== null && maxStep <= 0) throw new ConfigError(`${w}.max_step must be positive`);
  const tEnd = getNumber(raw, "t_end", w);
  const sampleDt = getNumber(raw, "sample_dt", w, 0.01);
  if (sampleDt <= 0) throw new ConfigError(`${w}.sample_dt must be positive`);
  return { method, rtol, atol, maxStep, tEnd, sampleDt };
}

export interface SimulateScenario {
  system: SystemId;
  params: Params;
  kappaSq: CoefficientSpec;
  f: string | null;
  g: string | null;
  initial: Record<string, number> | { polar: Record<string, number> };
  integrator: IntegratorSettings;
  channels: string[];
  invariants: string[];
  events: { component: string; direction: "rising" | "falling" | "any" }[];
}

const POLAR_CAPABLE: readonly SystemId[] = [
  "NR_EMP",
  "REL_EMP",
  "NR_OSC_2D",
  "REL_OSC_2D",
  "NR_RR",
  "REL_RR",
];

function initialState(
  obj: Record<string, Json>,
  system: SystemId,
  where: string,
): SimulateScenario["initial"] {
  const raw = obj["initial"];
  if (!isObject(raw)) throw new ConfigError(`${where}: missing required key 'initial'`);
  const w = `${where}.initial`;
  if ("polar" in raw) {
    checkKeys(raw, ["polar"], w);
    const pol = raw["polar"];
    if (!isObject(pol)) throw new ConfigError(`${w}.polar must be an object`);
    checkKeys(pol, ["rho", "rhodot", "theta", "t"], `${w}.polar`);
    if (!POLAR_CAPABLE.includes(system)) {
      throw new ConfigError(`${w}.polar does not apply to ${system}`);
    }
    const rho = getNumber(pol, "rho", `${w}.polar`);
    if (rho <= 0) throw new ConfigError(`${w}.polar.rho must be positive`);
    return {
      polar: {
        rho,
        rhodot: getNumber(pol, "rhodot", `${w}.polar`, 0.0),
        theta: getNumber(pol, "theta", `${w}.polar`, 0.0),
        t: getNumber(pol, "t", `${w}.polar`, 0.0),
      },
    };
  }
  const comps = STATE_COMPONENTS[system];
  checkKeys(raw, [...comps, "t"], w);
  const out: Record<string, number> = { t: getNumber(raw, "t", w, 0.0) };
  for (const comp of comps) {
    out[comp] = getNumber(raw, comp, w);
  }
  return out;
}

export function validateSimulate(config: Json): SimulateScenario {
  const where = "config";
  if (!isObject(config)) throw new ConfigError(`${where}: expected a JSON object`);
  checkKeys(
    config,
    ["system", "params", "kappa_sq", "f", "g", "initial", "integrator", "outputs"],
    where,
  );
  const system = getString(config, "system", where) as SystemId;
  if (!SYSTEM_IDS.includes(system)) {
    throw new ConfigError(`${where}.system: unknown id '${system}'`);
  }
  const p = params(config, where);
  const kappaSq = coefficient(config, "kappa_sq", "t", where);
  const f = couplingExpression(config, "f", where);
  const g = couplingExpression(config, "g", where);
  if (RR_IDS.includes(system)) {
    if (f === null || g === null) {
      throw new ConfigError(`${where}: ${system} requires both couplings f and g`);
    }
  } else if (f !== null || g !== null) {
    throw new ConfigError(`${where}: ${system} does not accept couplings f, g`);
  }
  const initial = initialState(config, system, where);
  const integ = integrator(config, where);

  const outputsRaw = config["outputs"] ?? {};
  if (!isObject(outputsRaw)) throw new ConfigError(`${where}.outputs: expected an object`);
  checkKeys(outputsRaw, ["channels", "invariants", "events"], `${where}.outputs`);
  const channels = (outputsRaw["channels"] ?? []) as Json;
  const invariants = (outputsRaw["invariants"] ?? []) as Json;
  const events = (outputsRaw["events"] ?? []) as Json;
  if (!Array.isArray(channels) || !channels.every((x) => typeof x === "string")) {
    throw new ConfigError(`${where}.outputs.channels must be a list of names`);
  }
  if (!Array.isArray(invariants) || !invariants.every((x) => typeof x === "string")) {
    throw new ConfigError(`${where}.outputs.invariants must be a list of names`);
  }
  for (const name of channels) {
    const systems = CHANNELS[name];
    if (systems === undefined) {
      throw new ConfigError(`${where}.outputs.channels: unknown channel '${name}'`);
    }
    if (!systems.includes(system)) {
      throw new ConfigError(`${where}.outputs.channels: '${name}' does not apply to ${system}`);
    }
  }
  for (const name of invariants) {
    const systems = INVARIANTS[name];
    if (systems === undefined) {
      throw new ConfigError(`${where}.outputs.invariants: unknown invariant '${name}'`);
    }
    if (!systems.includes(system)) {
      throw new ConfigError(
        `${where}.outputs.invariants: '${name}' applies to [${systems.join(", ")}], not ${system}`,
      );
    }
    if (KAPPA_BOUND_INVARIANTS.has(name) && kappaSq.constant === null) {
      throw new ConfigError(
        `${where}.outputs.invariants: '${name}' needs a constant kappa_sq`,
      );
    }
  }
  if (!Array.isArray(events)) {
    throw new ConfigError(`${where}.outputs.events must be a list`);
  }
  const eventSpecs: SimulateScenario["events"] = [];
  events.forEach((ev, i) => {
    if (!isObject(ev)) throw new ConfigError(`${where}.outputs.events[${i}] must be an object`);
    checkKeys(ev, ["component", "direction"], `${where}.outputs.events[${i}]`);
    const component = getString(ev, "component", `${where}.outputs.events[${i}]`);
    if (!STATE_COMPONENTS[system].includes(component)) {
      throw new ConfigError(
        `${where}.outputs.events[${i}].component '${component}' not in [${STATE_COMPONENTS[system].join(", ")}]`,
      );
    }
    const direction = getString(ev, "direction", `${where}.outputs.events[${i}]`, "any");
    if (direction !== "rising" && direction !== "falling" && direction !== "any") {
      throw new ConfigError(`${where}.outputs.events[${i}].direction: '${direction}'`);
    }
    eventSpecs.push({ component, direction });
  });

  return {
    system,
    params: p,
    kappaSq,
    f,
    g,
    initial,
    integrator: integ,
    channels: channels as string[],
    invariants: invariants as string[],
    events: eventSpecs,
  };
}

export interface SuperposeScenario {
  system: "REL_EMP" | "NR_EMP";
  params: Params;
  kappaSq: CoefficientSpec;
  delta: number;
  initial: Record<string, number>;
  integrator: IntegratorSettings;
  tol: number;
}

export function validateSuperpose(config: Json): SuperposeScenario {
  const where = "config";
  if (!isObject(config)) throw new ConfigError(`${where}: expected a JSON object`);
  checkKeys(
    config,
    ["system", "params", "kappa_sq", "delta", "initial", "integrator", "tol"],
    where,
  );
  const system = getString(config, "system", where, "REL_EMP");
  if (system !== "REL_EMP" && system !== "NR_EMP") {
    throw new ConfigError(`${where}.system: superposition runs on REL_EMP or NR_EMP`);
  }
  const p = params(config, where);
  if (!(p.J > 0)) {
    throw new ConfigError(`${where}.params.J: superposition law requires J > 0, got ${p.J}`);
  }
  const kappaSq = coefficient(config, "kappa_sq", "t", where);
  const delta = getNumber(config, "delta", where);
  const raw = config["initial"];
  if (!isObject(raw)) throw new ConfigError(`${where}: missing required key 'initial'`);
  checkKeys(raw, ["rho", "rhodot", "x", "vx", "t"], `${where}.initial`);
  const rho = getNumber(raw, "rho", `${where}.initial`);
  if (rho <= 0) throw new ConfigError(`${where}.initial.rho must be positive`);
  const initial: Record<string, number> = {
    rho,
    rhodot: getNumber(raw, "rhodot", `${where}.initial`, 0.0),
    t: getNumber(raw, "t", `${where}.initial`, 0.0),
  };
  if ("x" in raw) initial["x"] = getNumber(raw, "x", `${where}.initial`);
  if ("vx" in raw) initial["vx"] = getNumber(raw, "vx", `${where}.initial`);
  return {
    system,
    params: p,
    kappaSq,
    delta,
    initial,
    integrator: integrator(config, where),
    tol: getNumber(config, "tol", where, 1e-6),
  };
}

export interface RescaleScenario {
  omegaSq: CoefficientSpec;
  f: string | null;
  g: string | null;
  c: number;
  initial: { x: number; y: number; xp: number; yp: number };
  integrator: IntegratorSettings;
  tol: number;
  compare: "rrr" | "rr";
}

export function validateRescale(config: Json): RescaleScenario {
  const where = "config";
  if (!isObject(config)) throw new ConfigError(`${where}: expected a JSON object`);
  checkKeys(config, ["omega_sq", "f", "g", "c", "initial", "integrator", "tol", "compare"], where);
  const omegaSq = coefficient(config, "omega_sq", "tau", where);
  const f = couplingExpression(config, "f", where);
  const g = couplingExpression(config, "g", where);
  if ((f === null) !== (g === null)) {
    throw new ConfigError(`${where}: provide both couplings f and g, or neither`);
  }
  const c = getNumber(config, "c", where, 1.0);
  if (c <= 0) throw new ConfigError(`${where}.c must be positive`);
  const raw = config["initial"];
  if (!isObject(raw)) throw new ConfigError(`${where}: missing required key 'initial'`);
  checkKeys(raw, ["x", "y", "xp", "yp"], `${where}.initial`);
  const initial = {
    x: getNumber(raw, "x", `${where}.initial`),
    y: getNumber(raw, "y", `${where}.initial`),
    xp: getNumber(raw, "xp", `${where}.initial`, 0.0),
    yp: getNumber(raw, "yp", `${where}.initial`, 0.0),
  };
  const compare = getString(config, "compare", where, "rrr");
  if (compare !== "rrr" && compare !== "rr") {
    throw new ConfigError(`${where}.compare must be 'rrr' or 'rr'`);
  }
  return {
    omegaSq,
    f,
    g,
    c,
    initial,
    integrator: integrator(config, where),
    tol: getNumber(config, "tol", where, 1e-6),
    compare,
  };
}

export interface ScanScenario {
  n: number;
  seed: number;
  hMax: number;
}

export function validateScan(config: Json): ScanScenario {
  const where = "config";
  if (!isObject(config)) throw new ConfigError(`${where}: expected a JSON object`);
  checkKeys(config, ["n", "seed", "H_max"], where);
  const n = getNumber(config, "n", where, 1000);
  if (!Number.isInteger(n) || n < 1) {
    throw new ConfigError(`${where}.n must be an integer >= 1, got ${n}`);
  }
  const seed = getNumber(config, "seed", where, 0);
  if (!Number.isInteger(seed)) throw new ConfigError(`${where}.seed must be an integer`);
  const hMax = getNumber(config, "H_max", where, 3.0);
  if (hMax < 1) throw new ConfigError(`${where}.H_max must be >= 1`);
  return { n, seed, hMax };
}

export interface PotentialScenario {
  potential: "v1d" | "v";
  h: number;
  j: number;
  n: number;
}

export function validatePotential(config: Json): PotentialScenario {
  const where = "config";
  if (!isObject(config)) throw new ConfigError(`${where}: expected a JSON object`);
  checkKeys(config, ["potential", "H", "J", "n"], where);
  const potential = getString(config, "potential", where);
  if (potential !== "v1d" && potential !== "v") {
    throw new ConfigError(`${where}.potential must be 'v1d' or 'v'`);
  }
  const h = getNumber(config, "H", where);
  if (h < 1) throw new ConfigError(`${where}.H must be >= 1`);
  const j = getNumber(config, "J", where, 0.0);
  if (potential === "v" && j === 0) {
    throw new ConfigError(`${where}.J must be nonzero for the radial potential`);
  }
  const n = getNumber(config, "n", where, 401);
  if (!Number.isInteger(n) || n < 2) throw new ConfigError(`${where}.n must be an integer >= 2`);
  return { potential, h, j, n };
}
