/**
 * Fuzz the expression parser: random garbage must either parse or throw one
 * of the parser's own error types -- never crash, hang, or return undefined.
 */

import { describe, expect, it } from "vitest";

import { ExprError } from "../src/errors.js";
import { parse } from "../src/expr.js";

const RUNS = Number.parseInt(process.env.FUZZ_RUNS ?? "5000", 10);

// deterministic PRNG so failures reproduce
function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

const ACTIVE = "0123456789.+-*/^()ts,pie   sincoqrtabwxyz_eE";

function randomString(rand: () => number): string {
  const len = Math.floor(rand() * 40);
  let out = "";
  for (let i = 0; i < len; i++) {
    if (rand() < 0.9) {
      out += ACTIVE[Math.floor(rand() * ACTIVE.length)];
    } else {
      out += String.fromCodePoint(1 + Math.floor(rand() * 0xfff));
    }
  }
  return out;
}

describe("parser fuzzing", () => {
  it(`survives ${RUNS} random strings`, () => {
    const rand = mulberry32(20240817);
    let parsedOk = 0;
    for (let i = 0; i < RUNS; i++) {
      const text = randomString(rand);
      try {
        const e = parse(text, "t");
        parsedOk += 1;
        try {
          const v = e.eval(0.5);
          expect(typeof v).toBe("number");
          expect(Number.isNaN(v)).toBe(false);
        } catch (err) {
          expect(err).toBeInstanceOf(ExprError);
        }
      } catch (err) {
        expect(err).toBeInstanceOf(ExprError);
      }
    }
    // the generator leans on grammar-friendly characters, so a fair share parses
    expect(parsedOk).toBeGreaterThan(0);
  });

  it("never yields NaN from valid parses on random arguments", () => {
    const rand = mulberry32(7);
    const exprs = ["t^t", "1/(t-1)", "log(t)", "sqrt(t*t - 2*t)", "tan(t)/t"];
    for (let i = 0; i < 2000; i++) {
      const e = parse(exprs[i % exprs.length]!, "t");
      const arg = (rand() - 0.5) * 20;
      try {
        const v = e.eval(arg);
        expect(Number.isNaN(v)).toBe(false);
      } catch (err) {
        expect(err).toBeInstanceOf(ExprError);
      }
    }
  });
});
