/** Form state mirroring the run config, with client-side validation.
 *
 * Submit stays disabled until every client-checkable invariant passes:
 * interval endpoints ordered, gamma in [0.5, 1), target power in (0, 1),
 * positive design parameters and prior hyperparameters, positive q.
 */

import type { ComponentPrior, RunConfig } from "./types.js";

export interface FieldError {
  field: string;
  message: string;
}

export interface FormState {
  family: "gamma" | "bernoulli";
  eta1: number[];
  eta2: number[];
  characteristicKind: "tail_probability" | "mean" | "raw_parameter";
  comparison: "difference" | "ratio" | "log_ratio";
  threshold: number | null;
  index: number | null;
  q: number;
  gamma: number;
  targetPower: number;
  deltaStar: number | null;
  delta1: number | null;
  delta2: number | null;
  noninferiority: boolean;
  priorsGroup1: ComponentPrior[];
  priorsGroup2: ComponentPrior[];
  seed: number;
  nSob: number;
  nVar: number;
}

export function defaultFormState(): FormState {
  return {
    family: "gamma",
    eta1: [2.11, 0.69],
    eta2: [2.43, 0.79],
    characteristicKind: "tail_probability",
    comparison: "log_ratio",
    threshold: 4.29,
    index: null,
    q: 1.0,
    gamma: 0.9,
    targetPower: 0.7,
    deltaStar: 0.3,
    delta1: null,
    delta2: null,
    noninferiority: false,
    priorsGroup1: [
      { dist: "gamma", shape: 2, rate: 0.1 },
      { dist: "gamma", shape: 2, rate: 0.1 },
    ],
    priorsGroup2: [
      { dist: "gamma", shape: 2, rate: 0.1 },
      { dist: "gamma", shape: 2, rate: 0.1 },
    ],
    seed: 1,
    nSob: 1024,
    nVar: 256,
  };
}

function resolvedDeltas(state: FormState): [number, number] | null {
  if (state.deltaStar !== null) {
    if (!(state.deltaStar > 0)) return null;
    const upper =
      state.comparison === "difference"
        ? state.deltaStar
        : state.comparison === "ratio"
          ? 1 + state.deltaStar
          : Math.log(1 + state.deltaStar);
    const lower =
      state.comparison === "difference"
        ? -state.deltaStar
        : state.comparison === "ratio"
          ? 1 / (1 + state.deltaStar)
          : -Math.log(1 + state.deltaStar);
    return [lower, state.noninferiority ? Infinity : upper];
  }
  if (state.delta1 === null) return null;
  if (state.delta2 === null && !state.noninferiority) return null;
  return [state.delta1, state.noninferiority ? Infinity : state.delta2!];
}

function priorErrors(comps: ComponentPrior[], field: string): FieldError[] {
  const errors: FieldError[] = [];
  comps.forEach((c, i) => {
    const values =
      c.dist === "gamma" ? [c.shape, c.rate] : [c.a, c.b];
    if (!values.every((v) => typeof v === "number" && v > 0)) {
      errors.push({
        field: `${field}[${i}]`,
        message: "prior hyperparameters must be positive",
      });
    }
  });
  return errors;
}

export function validate(state: FormState): FieldError[] {
  const errors: FieldError[] = [];
  const paramCount = state.family === "gamma" ? 2 : 1;

  for (const [name, eta] of [
    ["eta1", state.eta1],
    ["eta2", state.eta2],
  ] as const) {
    if (eta.length !== paramCount) {
      errors.push({ field: name, message: `needs ${paramCount} value(s)` });
    } else if (state.family === "gamma" && !eta.every((v) => v > 0)) {
      errors.push({ field: name, message: "parameters must be positive" });
    } else if (state.family === "bernoulli" && !(eta[0] > 0 && eta[0] < 1)) {
      errors.push({ field: name, message: "probability must lie in (0, 1)" });
    }
  }
  if (state.characteristicKind === "tail_probability" && state.threshold === null) {
    errors.push({ field: "threshold", message: "tail probability needs a threshold" });
  }
  if (!(state.q > 0)) {
    errors.push({ field: "q", message: "allocation ratio must be positive" });
  }
  if (!(state.gamma >= 0.5 && state.gamma < 1)) {
    errors.push({ field: "gamma", message: "conviction threshold must lie in [0.5, 1)" });
  }
  if (!(state.targetPower > 0 && state.targetPower < 1)) {
    errors.push({ field: "targetPower", message: "target power must lie in (0, 1)" });
  }
  const deltas = resolvedDeltas(state);
  if (deltas === null) {
    errors.push({
      field: "delta",
      message: "give a positive margin or both interval endpoints",
    });
  } else if (!(deltas[0] < deltas[1])) {
    errors.push({ field: "delta", message: "delta1 must be less than delta2" });
  }
  errors.push(...priorErrors(state.priorsGroup1, "priorsGroup1"));
  errors.push(...priorErrors(state.priorsGroup2, "priorsGroup2"));
  if (!Number.isInteger(state.seed) || state.seed < 0) {
    errors.push({ field: "seed", message: "seed must be a nonnegative integer" });
  }
  return errors;
}

export function canSubmit(state: FormState): boolean {
  return validate(state).length === 0;
}

/** Serialize the form to the exact request body the service expects. */
export function toRunConfig(state: FormState): RunConfig {
  const characteristic: RunConfig["design"]["characteristic"] = {
    kind: state.characteristicKind,
    comparison: state.comparison,
  };
  if (state.threshold !== null) characteristic.threshold = state.threshold;
  if (state.index !== null) characteristic.index = state.index;
  const test: RunConfig["test"] = {
    gamma: state.gamma,
    target_power: state.targetPower,
  };
  if (state.noninferiority) {
    const deltas = resolvedDeltas(state);
    if (deltas === null) throw new Error("form not valid");
    test.delta1 = deltas[0];
    test.delta2 = "inf";
  } else if (state.deltaStar !== null) {
    test.delta_star = state.deltaStar;
  } else {
    test.delta1 = state.delta1 ?? undefined;
    test.delta2 = state.delta2 ?? undefined;
  }
  return {
    design: {
      family: state.family,
      eta1: [...state.eta1],
      eta2: [...state.eta2],
      characteristic,
      q: state.q,
    },
    priors: {
      group1: state.priorsGroup1.map((c) => ({ ...c })),
      group2: state.priorsGroup2.map((c) => ({ ...c })),
    },
    test,
    n_sob: state.nSob,
    n_var: state.nVar,
    seed: state.seed,
  };
}

/** Rehydrate the form from a config echo (report round trip). */
export function fromRunConfig(config: RunConfig): FormState {
  const state = defaultFormState();
  state.family = config.design.family;
  state.eta1 = [...config.design.eta1];
  state.eta2 = [...config.design.eta2];
  state.characteristicKind = config.design.characteristic.kind;
  state.comparison = config.design.characteristic.comparison;
  state.threshold = config.design.characteristic.threshold ?? null;
  state.index = config.design.characteristic.index ?? null;
  state.q = config.design.q ?? 1.0;
  state.gamma = config.test.gamma ?? state.gamma;
  state.targetPower = config.test.target_power ?? state.targetPower;
  if (config.test.delta_star !== undefined) {
    state.deltaStar = config.test.delta_star;
    state.noninferiority = false;
    state.delta1 = null;
    state.delta2 = null;
  } else {
    state.deltaStar = null;
    state.delta1 = typeof config.test.delta1 === "number" ? config.test.delta1 : null;
    state.noninferiority = config.test.delta2 === "inf";
    state.delta2 = typeof config.test.delta2 === "number" ? config.test.delta2 : null;
  }
  state.priorsGroup1 = config.priors.group1.map((c) => ({ ...c }));
  state.priorsGroup2 = config.priors.group2.map((c) => ({ ...c }));
  state.seed = config.seed ?? state.seed;
  state.nSob = config.n_sob ?? state.nSob;
  state.nVar = config.n_var ?? state.nVar;
  return state;
}
