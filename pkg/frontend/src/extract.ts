/**
 * Image directory -> FVEC feature file + sidecar manifest fragment.
 *
 * Images are processed in sorted-filename order; the sidecar records the
 * filename behind every feature row, any skipped (undecodable) files, the
 * preprocessing applied, and a ready-to-paste registry entry. Runs are
 * deterministic on a machine: same directory, same bytes out.
 */

import { basename, dirname, join } from 'path';
import { writeFileSync } from 'fs';

import * as tf from '@tensorflow/tfjs';

import { writeFvec } from './fvec';
import { decodeImage, listImageFiles } from './images';
import { FeatureModel, loadModel } from './models';

export interface ManifestFields {
  id?: string;
  source?: 'real' | 'synthetic';
  class?: string;
  iteration?: number;
  split?: 'train' | 'test';
}

export interface ExtractSpec {
  imageDir: string;
  outPath: string;
  model?: string;
  batchSize?: number;
  /** Override the model's input size (graph models of unusual geometry). */
  imageSize?: number;
  /** Fields copied into the sidecar's registry entry. */
  manifest?: ManifestFields;
}

export interface SkippedFile {
  file: string;
  reason: string;
}

export interface ExtractResult {
  count: number;
  dim: number;
  model: string;
  rows: string[];
  skipped: SkippedFile[];
  fvecPath: string;
  sidecarPath: string;
}

function preprocess(
  dir: string,
  name: string,
  model: FeatureModel,
): tf.Tensor3D {
  const img = decodeImage(dir, name);
  return tf.tidy(() => {
    let t = tf.tensor3d(img.pixels, [img.height, img.width, 3]);
    const side = Math.min(img.height, img.width);
    const top = Math.floor((img.height - side) / 2);
    const left = Math.floor((img.width - side) / 2);
    t = t.slice([top, left, 0], [side, side, 3]);
    t = tf.image.resizeBilinear(t, [model.imageSize, model.imageSize]);
    return t.sub(model.normalization.mean).div(model.normalization.std);
  });
}

export async function extractFeatures(spec: ExtractSpec): Promise<ExtractResult> {
  const batchSize = spec.batchSize ?? 16;
  if (batchSize < 1) {
    throw new Error(`batch size must be >= 1, got ${batchSize}`);
  }
  const model = await loadModel(spec.model, spec.imageSize);

  const names = listImageFiles(spec.imageDir);
  const rows: string[] = [];
  const skipped: SkippedFile[] = [];
  const tensors: tf.Tensor3D[] = [];
  for (const name of names) {
    try {
      tensors.push(preprocess(spec.imageDir, name, model));
      rows.push(name);
    } catch (err) {
      const reason = err instanceof Error ? err.message : String(err);
      console.warn(`warning: skipping ${name}: ${reason}`);
      skipped.push({ file: name, reason });
    }
  }
  if (rows.length === 0) {
    throw new Error(`no decodable images in ${spec.imageDir}`);
  }

  let dim = model.dim;
  const features: Float32Array[] = [];
  for (let start = 0; start < tensors.length; start += batchSize) {
    const slice = tensors.slice(start, start + batchSize);
    const batch = tf.stack(slice) as tf.Tensor4D;
    const pooled = model.embed(batch);
    if (dim === 0) {
      dim = pooled.shape[1];
    } else if (pooled.shape[1] !== dim) {
      throw new Error(
        `model ${model.id}: feature width ${pooled.shape[1]} != declared ${dim}`,
      );
    }
    features.push((await pooled.data()) as Float32Array);
    batch.dispose();
    pooled.dispose();
  }
  tensors.forEach(t => t.dispose());

  const flat = new Float32Array(rows.length * dim);
  let offset = 0;
  for (const part of features) {
    flat.set(part, offset);
    offset += part.length;
  }
  writeFvec(spec.outPath, rows.length, dim, flat);

  const fields = spec.manifest ?? {};
  const entry: Record<string, unknown> = {
    id: fields.id ?? basename(spec.outPath).replace(/\.fvec$/, ''),
    path: basename(spec.outPath),
    source: fields.source ?? 'real',
    class: fields.class ?? 'unlabeled',
  };
  if (fields.iteration !== undefined) {
    entry.iteration = fields.iteration;
  }
  if (fields.split !== undefined) {
    entry.split = fields.split;
  }
  const sidecarPath = spec.outPath + '.json';
  const sidecar = {
    model: model.id,
    dim,
    count: rows.length,
    preprocessing: {
      imageSize: model.imageSize,
      centerCrop: true,
      resize: 'bilinear',
      normalization: model.normalization,
    },
    rows,
    skipped,
    entry,
  };
  writeFileSync(sidecarPath, JSON.stringify(sidecar, null, 2) + '\n');

  return {
    count: rows.length,
    dim,
    model: model.id,
    rows,
    skipped,
    fvecPath: spec.outPath,
    sidecarPath,
  };
}
