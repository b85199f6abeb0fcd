/**
 * Deterministic PRNG matching the evaluation library's contract
 * (splitmix64 seed expansion + PCG-XSH-RR 32-bit outputs), used to generate
 * the built-in backbone's fixed weights. BigInt keeps the 64-bit state math
 * exact, so the weight stream is identical everywhere.
 */

const MASK64 = (1n << 64n) - 1n;
const MASK32 = 0xffffffffn;
const PCG_MULT = 6364136223846793005n;
const PCG_DEFAULT_SEQ = 54n;

export function splitmix64(x: bigint): bigint {
  let z = (x + 0x9e3779b97f4a7c15n) & MASK64;
  z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK64;
  z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & MASK64;
  return (z ^ (z >> 31n)) & MASK64;
}

export class Pcg32 {
  private state: bigint;
  private readonly inc: bigint;
  private spare: number | null = null;

  constructor(seed: bigint, seq: bigint = PCG_DEFAULT_SEQ) {
    this.state = 0n;
    this.inc = (((seq & MASK64) << 1n) | 1n) & MASK64;
    this.nextU32();
    this.state = (this.state + (seed & MASK64)) & MASK64;
    this.nextU32();
  }

  nextU32(): number {
    const old = this.state;
    this.state = (old * PCG_MULT + this.inc) & MASK64;
    const xorshifted = (((old >> 18n) ^ old) >> 27n) & MASK32;
    const rot = old >> 59n;
    const out = ((xorshifted >> rot) | (xorshifted << ((-rot) & 31n))) & MASK32;
    return Number(out);
  }

  /** 53-bit uniform double in [0, 1). */
  uniform(): number {
    const hi = this.nextU32() >>> 5;
    const lo = this.nextU32() >>> 6;
    return (hi * 67108864 + lo) / 9007199254740992;
  }

  /** Standard normal via Box-Muller (deterministic pair caching). */
  normal(): number {
    if (this.spare !== null) {
      const z = this.spare;
      this.spare = null;
      return z;
    }
    const u1 = 1 - this.uniform();
    const u2 = this.uniform();
    const r = Math.sqrt(-2 * Math.log(u1));
    const theta = 2 * Math.PI * u2;
    this.spare = r * Math.sin(theta);
    return r * Math.cos(theta);
  }

  normalArray(n: number): Float32Array {
    const out = new Float32Array(n);
    for (let i = 0; i < n; i++) {
      out[i] = Math.fround(this.normal());
    }
    return out;
  }
}
