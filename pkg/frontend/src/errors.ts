/** Error types thrown by the expression parser and config validators. */

export class ExprError extends Error {
  constructor(message: string) {
    super(message);
    this.name = new.target.name;
  }
}

export class ExprSyntaxError extends ExprError {
  /** Byte offset (UTF-8) of the offending input position. */
  readonly offset: number;

  constructor(message: string, offset: number) {
    super(`${message} (byte ${offset})`);
    this.offset = offset;
  }
}

export class ExprNameError extends ExprError {
  readonly ident: string;
  readonly offset: number;

  constructor(ident: string, offset: number) {
    super(`unknown identifier '${ident}' (byte ${offset})`);
    this.ident = ident;
    this.offset = offset;
  }
}

export class ExprArityError extends ExprError {
  readonly offset: number;

  constructor(fn: string, expected: number, got: number, offset: number) {
    super(`${fn}() takes ${expected} argument(s), got ${got} (byte ${offset})`);
    this.offset = offset;
  }
}

export class ExprDomainError extends ExprError {
  constructor(message: string) {
    super(`domain error: ${message}`);
  }
}

export class ConfigError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ConfigError";
  }
}
