/**
 * Parser/evaluator for the coefficient-expression grammar of remp scenario
 * files, so configs can be validated and previewed without invoking the CLI.
 *
 * Grammar (loosest first):
 *
 *     expr   := term  (('+' | '-') term)*
 *     term   := unary (('*' | '/') unary)*
 *     unary  := '-' unary | power
 *     power  := atom ('^' unary)?          // right-associative
 *     atom   := NUMBER | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')'
 *
 * One free variable, fixed at parse time; constants pi and e; functions
 * sin cos tan exp log sqrt abs (unary) and pow (binary). Domain errors
 * (log of a non-positive value, sqrt of a negative, division by zero,
 * overflowing exp/pow) throw ExprDomainError instead of yielding NaN or
 * Infinity, matching the backend's behavior.
 */

import {
  ExprArityError,
  ExprDomainError,
  ExprNameError,
  ExprSyntaxError,
} from "./errors.js";

const CONSTANTS: Record<string, number> = { pi: Math.PI, e: Math.E };

const FUNCTIONS: Record<string, { arity: number }> = {
  sin: { arity: 1 },
  cos: { arity: 1 },
  tan: { arity: 1 },
  exp: { arity: 1 },
  log: { arity: 1 },
  sqrt: { arity: 1 },
  abs: { arity: 1 },
  pow: { arity: 2 },
};

const MAX_DEPTH = 100;

// --- AST ---------------------------------------------------------------------

export type Node =
  | { kind: "num"; value: number }
  | { kind: "var" }
  | { kind: "const"; name: string }
  | { kind: "neg"; operand: Node }
  | { kind: "bin"; op: "+" | "-" | "*" | "/" | "^"; left: Node; right: Node }
  | { kind: "call"; name: string; args: Node[] };

// --- tokenizer ---------------------------------------------------------------

type TokenKind = "num" | "ident" | "op" | "end";

interface Token {
  kind: TokenKind;
  text: string;
  index: number; // UTF-16 index into the source
}

const OP_CHARS = new Set(["+", "-", "*", "/", "^", "(", ")", ","]);

const encoder = new TextEncoder();

function byteOffset(text: string, index: number): number {
  return encoder.encode(text.slice(0, index)).length;
}

function isDigit(ch: string): boolean {
  return ch >= "0" && ch <= "9";
}

function isIdentStart(ch: string): boolean {
  return /[A-Za-z_]/.test(ch);
}

function isIdentPart(ch: string): boolean {
  return /[A-Za-z0-9_]/.test(ch);
}

function tokenize(text: string): Token[] {
  const tokens: Token[] = [];
  let i = 0;
  const n = text.length;
  while (i < n) {
    const ch = text[i]!;
    if (/\s/.test(ch)) {
      i += 1;
      continue;
    }
    if (OP_CHARS.has(ch)) {
      tokens.push({ kind: "op", text: ch, index: i });
      i += 1;
      continue;
    }
    if (isDigit(ch) || (ch === "." && i + 1 < n && isDigit(text[i + 1]!))) {
      let j = i;
      while (j < n && (isDigit(text[j]!) || text[j] === ".")) j += 1;
      if (j < n && (text[j] === "e" || text[j] === "E")) {
        let k = j + 1;
        if (k < n && (text[k] === "+" || text[k] === "-")) k += 1;
        if (k < n && isDigit(text[k]!)) {
          j = k;
          while (j < n && isDigit(text[j]!)) j += 1;
        }
      }
      const lexeme = text.slice(i, j);
      if (!/^(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$/.test(lexeme)) {
        throw new ExprSyntaxError(`malformed number '${lexeme}'`, byteOffset(text, i));
      }
      tokens.push({ kind: "num", text: lexeme, index: i });
      i = j;
      continue;
    }
    if (isIdentStart(ch)) {
      let j = i;
      while (j < n && isIdentPart(text[j]!)) j += 1;
      tokens.push({ kind: "ident", text: text.slice(i, j), index: i });
      i = j;
      continue;
    }
    throw new ExprSyntaxError(`unexpected character '${ch}'`, byteOffset(text, i));
  }
  tokens.push({ kind: "end", text: "", index: n });
  return tokens;
}

// --- parser ------------------------------------------------------------------

class Parser {
  private pos = 0;
  private depth = 0;

  constructor(
    private readonly text: string,
    private readonly tokens: Token[],
    private readonly variable: string,
  ) {}

  parse(): Node {
    const node = this.expr();
    const tok = this.peek();
    if (tok.kind !== "end") {
      this.fail(`unexpected '${tok.text}', expected operator or end`, tok.index);
    }
    return node;
  }

  private peek(): Token {
    return this.tokens[this.pos]!;
  }

  private advance(): Token {
    return this.tokens[this.pos++]!;
  }

  private fail(message: string, index: number): never {
    throw new ExprSyntaxError(message, byteOffset(this.text, index));
  }

  private enter(index: number): void {
    this.depth += 1;
    if (this.depth > MAX_DEPTH) {
      this.fail("expression nested too deeply", index);
    }
  }

  private expr(): Node {
    this.enter(this.peek().index);
    try {
      let node = this.term();
      for (;;) {
        const tok = this.peek();
        if (tok.kind === "op" && (tok.text === "+" || tok.text === "-")) {
          this.advance();
          node = { kind: "bin", op: tok.text, left: node, right: this.term() };
        } else {
          return node;
        }
      }
    } finally {
      this.depth -= 1;
    }
  }

  private term(): Node {
    let node = this.unary();
    for (;;) {
      const tok = this.peek();
      if (tok.kind === "op" && (tok.text === "*" || tok.text === "/")) {
        this.advance();
        node = { kind: "bin", op: tok.text, left: node, right: this.unary() };
      } else {
        return node;
      }
    }
  }

  private unary(): Node {
    const tok = this.peek();
    if (tok.kind === "op" && tok.text === "-") {
      this.enter(tok.index);
      try {
        this.advance();
        return { kind: "neg", operand: this.unary() };
      } finally {
        this.depth -= 1;
      }
    }
    return this.power();
  }

  private power(): Node {
    const node = this.atom();
    const tok = this.peek();
    if (tok.kind === "op" && tok.text === "^") {
      this.advance();
      // right-associative; the exponent may carry its own unary minus
      return { kind: "bin", op: "^", left: node, right: this.unary() };
    }
    return node;
  }

  private atom(): Node {
    const tok = this.advance();
    if (tok.kind === "num") {
      return { kind: "num", value: Number(tok.text) };
    }
    if (tok.kind === "ident") {
      const next = this.peek();
      if (next.kind === "op" && next.text === "(") {
        return this.call(tok);
      }
      if (tok.text === this.variable) {
        return { kind: "var" };
      }
      if (tok.text in CONSTANTS) {
        return { kind: "const", name: tok.text };
      }
      throw new ExprNameError(tok.text, byteOffset(this.text, tok.index));
    }
    if (tok.kind === "op" && tok.text === "(") {
      const node = this.expr();
      const close = this.advance();
      if (!(close.kind === "op" && close.text === ")")) {
        this.fail(`expected ')', got '${close.text || "end of input"}'`, close.index);
      }
      return node;
    }
    this.fail(
      `expected a number, name or '(', got '${tok.text || "end of input"}'`,
      tok.index,
    );
  }

  private call(nameTok: Token): Node {
    const spec = FUNCTIONS[nameTok.text];
    if (spec === undefined) {
      throw new ExprNameError(nameTok.text, byteOffset(this.text, nameTok.index));
    }
    this.advance(); // '('
    const args: Node[] = [this.expr()];
    for (;;) {
      const tok = this.advance();
      if (tok.kind === "op" && tok.text === ")") break;
      if (tok.kind === "op" && tok.text === ",") {
        args.push(this.expr());
      } else {
        this.fail(`expected ',' or ')', got '${tok.text || "end of input"}'`, tok.index);
      }
    }
    if (args.length !== spec.arity) {
      throw new ExprArityError(
        nameTok.text,
        spec.arity,
        args.length,
        byteOffset(this.text, nameTok.index),
      );
    }
    return { kind: "call", name: nameTok.text, args };
  }
}

// --- evaluation --------------------------------------------------------------

function applyFunction(name: string, args: number[]): number {
  switch (name) {
    case "sin":
      return Math.sin(args[0]!);
    case "cos":
      return Math.cos(args[0]!);
    case "tan":
      return Math.tan(args[0]!);
    case "exp": {
      const r = Math.exp(args[0]!);
      if (!Number.isFinite(r)) throw new ExprDomainError(`exp of ${args[0]} overflows`);
      return r;
    }
    case "log": {
      if (args[0]! <= 0) throw new ExprDomainError(`log of ${args[0]}`);
      return Math.log(args[0]!);
    }
    case "sqrt": {
      if (args[0]! < 0) throw new ExprDomainError(`sqrt of ${args[0]}`);
      return Math.sqrt(args[0]!);
    }
    case "abs":
      return Math.abs(args[0]!);
    case "pow": {
      const r = Math.pow(args[0]!, args[1]!);
      if (Number.isNaN(r) || !Number.isFinite(r)) {
        throw new ExprDomainError(`pow of ${args[0]},${args[1]} is undefined or overflows`);
      }
      return r;
    }
    default:
      throw new ExprDomainError(`unknown function ${name}`);
  }
}

function evalNode(node: Node, value: number): number {
  switch (node.kind) {
    case "num":
      return node.value;
    case "var":
      return value;
    case "const":
      return CONSTANTS[node.name]!;
    case "neg":
      return -evalNode(node.operand, value);
    case "bin":
      return evalBin(node, value);
    case "call":
      return applyFunction(
        node.name,
        node.args.map((arg) => evalNode(arg, value)),
      );
  }
}

function evalBin(node: Extract<Node, { kind: "bin" }>, value: number): number {
  const a = evalNode(node.left, value);
  const b = evalNode(node.right, value);
  switch (node.op) {
    case "+":
      return a + b;
    case "-":
      return a - b;
    case "*":
      return a * b;
    case "/":
      if (b === 0) throw new ExprDomainError(`division of ${a} by zero`);
      return a / b;
    case "^": {
      const r = Math.pow(a, b);
      if (Number.isNaN(r) || !Number.isFinite(r)) {
        throw new ExprDomainError(`${a} ^ ${b} is undefined or overflows`);
      }
      return r;
    }
  }
}

// --- printing ----------------------------------------------------------------

const PRECEDENCE: Record<string, number> = { "+": 1, "-": 1, "*": 2, "/": 2, neg: 3, "^": 4 };

function printNode(node: Node, parentPrec: number, variable: string): string {
  switch (node.kind) {
    case "num":
      return String(node.value);
    case "var":
      return variable;
    case "const":
      return node.name;
    case "neg": {
      const s = `-${printNode(node.operand, PRECEDENCE.neg!, variable)}`;
      return parentPrec > PRECEDENCE.neg! ? `(${s})` : s;
    }
    case "bin": {
      const prec = PRECEDENCE[node.op]!;
      const left = printNode(node.left, node.op === "^" ? prec + 1 : prec, variable);
      const right = printNode(node.right, node.op === "^" ? prec : prec + 1, variable);
      const s = `${left} ${node.op} ${right}`;
      return prec < parentPrec ? `(${s})` : s;
    }
    case "call":
      return `${node.name}(${node.args.map((a) => printNode(a, 0, variable)).join(", ")})`;
  }
}

// --- public interface ----------------------------------------------------------

/** A parsed expression in one free variable; immutable. */
export class Expr {
  constructor(
    readonly root: Node,
    readonly variable: string,
    readonly source: string,
  ) {}

  eval(value: number): number {
    return evalNode(this.root, value);
  }

  toString(): string {
    return printNode(this.root, 0, this.variable);
  }
}

/** Parse expression text with the given free variable name. */
export function parse(text: string, variable: string): Expr {
  if (text.trim() === "") {
    throw new ExprSyntaxError("empty expression", 0);
  }
  const tokens = tokenize(text);
  return new Expr(new Parser(text, tokens, variable).parse(), variable, text);
}
