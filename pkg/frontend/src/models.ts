/**
 * Feature backbones. A model takes a normalized image batch and returns one
 * pooled feature row per image.
 *
 * Registered ids:
 *  - "inception-v3": the customary 2048-d pooled feature space, loaded as a
 *    tfjs graph model from TF Hub (needs network access or a local copy).
 *  - "seeded-cnn": built-in 256-d convolutional backbone whose weights are
 *    generated from a fixed splitmix64/PCG32 stream, so it works with no
 *    downloads and is identical everywhere. Not a trained network; it
 *    provides stable random-projection features for hermetic pipelines.
 *  - any path or URL to a graph-model JSON: loaded as-is, feature width
 *    probed from the model output.
 */

import { readFileSync } from 'fs';
import { dirname, join } from 'path';

import * as tf from '@tensorflow/tfjs';

import { Pcg32, splitmix64 } from './rng';

export interface Normalization {
  mean: number;
  std: number;
}

export interface FeatureModel {
  id: string;
  /** Declared feature width; 0 means "probe from the first batch". */
  dim: number;
  imageSize: number;
  normalization: Normalization;
  embed(batch: tf.Tensor4D): tf.Tensor2D;
}

export const DEFAULT_MODEL = 'inception-v3';

const INCEPTION_V3_URL =
  'https://tfhub.dev/google/tfjs-model/imagenet/inception_v3/feature_vector/3/default/1';

const SEEDED_CNN_SEED = 0x5eedc1dacafen;
// 3x3 stride-2 conv stack over a 64x64 input, then global average pooling
const SEEDED_CNN_CHANNELS = [3, 32, 64, 128, 256];

function buildSeededCnn(): FeatureModel {
  const rng = new Pcg32(splitmix64(SEEDED_CNN_SEED));
  const kernels: tf.Tensor4D[] = [];
  for (let layer = 0; layer + 1 < SEEDED_CNN_CHANNELS.length; layer++) {
    const inCh = SEEDED_CNN_CHANNELS[layer];
    const outCh = SEEDED_CNN_CHANNELS[layer + 1];
    const fanIn = 3 * 3 * inCh;
    const std = Math.sqrt(2 / fanIn);
    const raw = rng.normalArray(3 * 3 * inCh * outCh);
    for (let i = 0; i < raw.length; i++) {
      raw[i] = Math.fround(raw[i] * std);
    }
    kernels.push(tf.tensor4d(raw, [3, 3, inCh, outCh]));
  }
  return {
    id: 'seeded-cnn',
    dim: SEEDED_CNN_CHANNELS[SEEDED_CNN_CHANNELS.length - 1],
    imageSize: 64,
    normalization: { mean: 0.5, std: 0.5 },
    embed(batch: tf.Tensor4D): tf.Tensor2D {
      return tf.tidy(() => {
        let x: tf.Tensor4D = batch;
        for (const kernel of kernels) {
          x = tf.relu(tf.conv2d(x, kernel, 2, 'same'));
        }
        return tf.mean(x, [1, 2]) as tf.Tensor2D;
      });
    },
  };
}

/** IO handler for graph models stored on the local filesystem
 * (the plain tfjs package only ships HTTP loading). */
function localGraphModelHandler(jsonPath: string): tf.io.IOHandler {
  return {
    load: async () => {
      const doc = JSON.parse(readFileSync(jsonPath, 'utf-8'));
      const dir = dirname(jsonPath);
      const manifest: Array<{ paths: string[]; weights: tf.io.WeightsManifestEntry[] }> =
        doc.weightsManifest ?? [];
      const weightSpecs = manifest.flatMap(group => group.weights);
      const buffers = manifest.flatMap(group =>
        group.paths.map(p => readFileSync(join(dir, p))),
      );
      const weightData = Buffer.concat(buffers);
      return {
        modelTopology: doc.modelTopology,
        weightSpecs,
        weightData: weightData.buffer.slice(
          weightData.byteOffset,
          weightData.byteOffset + weightData.byteLength,
        ),
        format: doc.format,
        generatedBy: doc.generatedBy,
        convertedBy: doc.convertedBy,
        signature: doc.signature,
      };
    },
  };
}

function graphModelFeatureModel(
  id: string,
  model: tf.GraphModel,
  dim: number,
  imageSize: number,
  normalization: Normalization,
): FeatureModel {
  return {
    id,
    dim,
    imageSize,
    normalization,
    embed(batch: tf.Tensor4D): tf.Tensor2D {
      return tf.tidy(() => {
        const raw = model.predict(batch);
        let out = (Array.isArray(raw) ? raw[0] : raw) as tf.Tensor;
        if (out.rank === 4) {
          out = tf.mean(out, [1, 2]);
        }
        if (out.rank !== 2) {
          throw new Error(`model ${id}: cannot pool output of rank ${out.rank}`);
        }
        return out as tf.Tensor2D;
      });
    },
  };
}

export async function loadModel(id: string = DEFAULT_MODEL, imageSize?: number): Promise<FeatureModel> {
  await tf.setBackend('cpu');
  await tf.ready();
  if (id === 'seeded-cnn') {
    return buildSeededCnn();
  }
  if (id === 'inception-v3') {
    let model: tf.GraphModel;
    try {
      model = await tf.loadGraphModel(INCEPTION_V3_URL, { fromTFHub: true });
    } catch (err) {
      throw new Error(
        `model 'inception-v3' could not be fetched from TF Hub (${(err as Error).message}). ` +
          `Pass a local graph-model JSON path instead, or use --model seeded-cnn ` +
          `for the built-in offline backbone.`,
      );
    }
    return graphModelFeatureModel(id, model, 2048, imageSize ?? 299, { mean: 0, std: 1 });
  }
  if (id.endsWith('.json') || id.includes('/')) {
    const handler = id.startsWith('http') ? undefined : localGraphModelHandler(id);
    const model = await tf.loadGraphModel(handler ?? id);
    // feature width probed from the first batch (dim 0 = unknown)
    return graphModelFeatureModel(id, model, 0, imageSize ?? 299, { mean: 0, std: 1 });
  }
  throw new Error(`unknown model '${id}' (inception-v3 | seeded-cnn | path to model.json)`);
}
