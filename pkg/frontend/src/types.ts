/** Wire types mirroring the design service's JSON schemas. */

export type Comparison = "difference" | "ratio" | "log_ratio";
export type CharacteristicKind = "tail_probability" | "mean" | "raw_parameter";

export interface CharacteristicConfig {
  kind: CharacteristicKind;
  comparison: Comparison;
  threshold?: number;
  index?: number;
}

export interface DesignConfig {
  family: "gamma" | "bernoulli";
  eta1: number[];
  eta2: number[];
  characteristic: CharacteristicConfig;
  q?: number;
}

export interface ComponentPrior {
  dist: "gamma" | "beta";
  shape?: number;
  rate?: number;
  a?: number;
  b?: number;
}

export interface TestConfig {
  mode?: "calibrated" | "explicit";
  gamma?: number;
  target_power?: number;
  delta_star?: number;
  delta1?: number | "inf" | "-inf";
  delta2?: number | "inf" | "-inf";
  l?: number;
  alpha?: number;
}

export interface RunConfig {
  design: DesignConfig;
  priors: { group1: ComponentPrior[]; group2: ComponentPrior[] };
  test: TestConfig;
  n_sob?: number;
  n_var?: number;
  seed?: number;
  oracle?: { reps?: number; m?: number };
}

export type Knot = [number, number];

export interface DesignReport {
  format: string;
  engine_version: string;
  config: RunConfig & { seed: number };
  config_hash: string;
  stage_one: {
    mu_l: number;
    sigma_l: number;
    l: number;
    alpha: number;
    z: number;
    inv_fisher_theta: number;
    a_squared: number;
    n_sob: number;
    censored_count: number;
    classification: string;
    seed: number | null;
  };
  stage_two: {
    mu_tilde: number;
    mu_dot: number;
    mu_ddot: number;
    sigma_ddot: number;
    sigma_eps_hat: number;
    gamma_tilde: number;
    beta0_hat: number;
    beta1_hat: number;
    mu_hat: number;
    sigma_hat: number;
    p_tilde: number;
    n_recommended: number;
    curve_scale: number;
    n_var: number;
    n_failed: number;
    sub_seeds: number[];
  } | null;
  sssd: {
    mu: number;
    sigma: number;
    l: number;
    alpha: number;
    stage: string;
    probable_domain: [number, number];
  };
  classification: string;
  recommendation: { n: number; p_tilde: number } | null;
  curves: { f_star?: Knot[]; f_tilde?: Knot[] };
  warnings: string[];
  timings: Record<string, number>;
}

export interface EngineErrorBody {
  error_code: string;
  message: string;
  field?: string;
  classification?: string;
}
