/**
 * FVEC binary feature files (the evaluation toolkit's on-disk format).
 *
 * Layout, all little-endian: "FVEC" magic, u32 version (1), u32 count,
 * u32 dim, then count*dim IEEE-754 binary32 values row-major. Writes are
 * bit-deterministic and reject non-finite values.
 */

import { writeFileSync, readFileSync } from 'fs';

export const FVEC_MAGIC = 'FVEC';
export const FVEC_VERSION = 1;
const HEADER_BYTES = 16;

export function encodeFvec(count: number, dim: number, data: Float32Array): Buffer {
  if (count < 1 || dim < 1) {
    throw new Error(`count and dim must be >= 1, got ${count}x${dim}`);
  }
  if (data.length !== count * dim) {
    throw new Error(`payload length ${data.length} != count*dim ${count * dim}`);
  }
  const buf = Buffer.alloc(HEADER_BYTES + 4 * data.length);
  buf.write(FVEC_MAGIC, 0, 'ascii');
  buf.writeUInt32LE(FVEC_VERSION, 4);
  buf.writeUInt32LE(count, 8);
  buf.writeUInt32LE(dim, 12);
  const view = new DataView(buf.buffer, buf.byteOffset + HEADER_BYTES);
  for (let i = 0; i < data.length; i++) {
    const v = data[i];
    if (!Number.isFinite(v)) {
      throw new Error(`non-finite value at (${Math.floor(i / dim)}, ${i % dim})`);
    }
    view.setFloat32(4 * i, v, true);
  }
  return buf;
}

export function writeFvec(path: string, count: number, dim: number, data: Float32Array): void {
  writeFileSync(path, encodeFvec(count, dim, data));
}

export interface FvecContent {
  count: number;
  dim: number;
  data: Float32Array;
}

/** Reader used by the tests to check what was written. */
export function readFvec(path: string): FvecContent {
  const buf = readFileSync(path);
  if (buf.length < HEADER_BYTES) {
    throw new Error(`${path}: truncated header`);
  }
  if (buf.toString('ascii', 0, 4) !== FVEC_MAGIC) {
    throw new Error(`${path}: bad magic`);
  }
  const version = buf.readUInt32LE(4);
  if (version !== FVEC_VERSION) {
    throw new Error(`${path}: unsupported version ${version}`);
  }
  const count = buf.readUInt32LE(8);
  const dim = buf.readUInt32LE(12);
  const expected = count * dim * 4;
  if (buf.length - HEADER_BYTES < expected) {
    throw new Error(`${path}: truncated: expected ${expected} bytes, got ${buf.length - HEADER_BYTES}`);
  }
  const data = new Float32Array(count * dim);
  const view = new DataView(buf.buffer, buf.byteOffset + HEADER_BYTES);
  for (let i = 0; i < data.length; i++) {
    data[i] = view.getFloat32(4 * i, true);
  }
  return { count, dim, data };
}
