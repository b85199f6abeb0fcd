import { describe, expect, it } from 'vitest';

import { Pcg32, splitmix64 } from '../src/rng';

describe('pcg32', () => {
  it('matches the reference sequence for seed 42 / stream 54', () => {
    const rng = new Pcg32(42n, 54n);
    const got = Array.from({ length: 6 }, () => rng.nextU32());
    expect(got).toEqual([0xa15c02b7, 0x7b47f409, 0xba1d3330, 0x83d2f293, 0xbfa4784b, 0xcbed606e]);
  });

  it('uniform stays in [0, 1)', () => {
    const rng = new Pcg32(7n);
    for (let i = 0; i < 2000; i++) {
      const u = rng.uniform();
      expect(u).toBeGreaterThanOrEqual(0);
      expect(u).toBeLessThan(1);
    }
  });

  it('normalArray is deterministic and roughly standard', () => {
    const a = new Pcg32(5n).normalArray(20000);
    const b = new Pcg32(5n).normalArray(20000);
    expect(Buffer.from(a.buffer).equals(Buffer.from(b.buffer))).toBe(true);
    const mean = a.reduce((s, v) => s + v, 0) / a.length;
    const varSum = a.reduce((s, v) => s + (v - mean) * (v - mean), 0) / a.length;
    expect(Math.abs(mean)).toBeLessThan(0.03);
    expect(Math.abs(Math.sqrt(varSum) - 1)).toBeLessThan(0.03);
  });
});

describe('splitmix64', () => {
  it('matches the reference value for 0', () => {
    expect(splitmix64(0n)).toBe(0xe220a8397b1dcdafn);
  });

  it('disperses consecutive seeds', () => {
    const outs = new Set<bigint>();
    for (let i = 0n; i < 512n; i++) {
      outs.add(splitmix64(i));
    }
    expect(outs.size).toBe(512);
  });
});
