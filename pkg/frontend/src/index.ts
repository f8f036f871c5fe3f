export {
  ConfigError,
  ExprArityError,
  ExprDomainError,
  ExprError,
  ExprNameError,
  ExprSyntaxError,
} from "./errors.js";
export { Expr, parse } from "./expr.js";
export type { Node } from "./expr.js";
export {
  CHANNELS,
  INVARIANTS,
  STATE_COMPONENTS,
  SYSTEM_IDS,
  validatePotential,
  validateRescale,
  validateScan,
  validateSimulate,
  validateSuperpose,
} from "./scenario.js";
export type {
  CoefficientSpec,
  IntegratorSettings,
  Params,
  PotentialScenario,
  RescaleScenario,
  ScanScenario,
  SimulateScenario,
  SuperposeScenario,
  SystemId,
} from "./scenario.js";
export { column, parseCsv, parseSummary } from "./results.js";
export type {
  DriftReport,
  EventRecord,
  RescaleSummary,
  ScanSummary,
  Series,
  SimulateSummary,
  Summary,
  SuperposeSummary,
} from "./results.js";
