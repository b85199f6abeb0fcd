/**
 * Image listing and decoding: PNG via pngjs, JPEG via jpeg-js. Files are
 * processed in sorted-filename order; a file that fails to decode is
 * reported to the caller rather than aborting the run.
 */

import { readdirSync, readFileSync } from 'fs';
import { extname, join } from 'path';

import * as jpeg from 'jpeg-js';
import { PNG } from 'pngjs';

const IMAGE_EXTENSIONS = new Set(['.png', '.jpg', '.jpeg']);

export interface DecodedImage {
  width: number;
  height: number;
  /** RGB interleaved, values in [0, 1]. */
  pixels: Float32Array;
}

export function listImageFiles(dir: string): string[] {
  const names = readdirSync(dir).filter(name =>
    IMAGE_EXTENSIONS.has(extname(name).toLowerCase()),
  );
  names.sort();
  return names;
}

function rgbaToRgb01(rgba: Uint8Array, width: number, height: number): Float32Array {
  const out = new Float32Array(width * height * 3);
  for (let p = 0; p < width * height; p++) {
    out[3 * p] = rgba[4 * p] / 255;
    out[3 * p + 1] = rgba[4 * p + 1] / 255;
    out[3 * p + 2] = rgba[4 * p + 2] / 255;
  }
  return out;
}

export function decodeImage(dir: string, name: string): DecodedImage {
  const raw = readFileSync(join(dir, name));
  const ext = extname(name).toLowerCase();
  if (ext === '.png') {
    const png = PNG.sync.read(raw);
    return {
      width: png.width,
      height: png.height,
      pixels: rgbaToRgb01(png.data, png.width, png.height),
    };
  }
  const img = jpeg.decode(raw, { useTArray: true, maxMemoryUsageInMB: 512 });
  return {
    width: img.width,
    height: img.height,
    pixels: rgbaToRgb01(img.data, img.width, img.height),
  };
}
