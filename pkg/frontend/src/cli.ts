#!/usr/bin/env node
/**
 * clinrel-extract: turn an image directory into an FVEC feature file.
 *
 *   clinrel-extract extract --in <dir> --out <file.fvec> [--model <id>]
 *                           [--batch N] [--image-size N]
 *                           [--id ID] [--source real|synthetic]
 *                           [--class LABEL] [--iteration N] [--split train|test]
 *
 * Exit codes: 0 success, 1 extraction failure, 2 usage error.
 */

import { parseArgs } from 'node:util';

import { extractFeatures, ManifestFields } from './extract';
import { DEFAULT_MODEL } from './models';

const USAGE =
  'usage: clinrel-extract extract --in <dir> --out <file.fvec> ' +
  '[--model <id>] [--batch N] [--image-size N] ' +
  '[--id ID] [--source real|synthetic] [--class LABEL] [--iteration N] [--split train|test]';

export async function main(argv: string[]): Promise<number> {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        in: { type: 'string' },
        out: { type: 'string' },
        model: { type: 'string', default: DEFAULT_MODEL },
        batch: { type: 'string' },
        'image-size': { type: 'string' },
        id: { type: 'string' },
        source: { type: 'string' },
        class: { type: 'string' },
        iteration: { type: 'string' },
        split: { type: 'string' },
      },
    });
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    console.error(USAGE);
    return 2;
  }
  const { values, positionals } = parsed;
  if (positionals[0] !== 'extract' || positionals.length !== 1) {
    console.error(USAGE);
    return 2;
  }
  if (!values.in || !values.out) {
    console.error('error: --in and --out are required');
    console.error(USAGE);
    return 2;
  }
  if (values.source && values.source !== 'real' && values.source !== 'synthetic') {
    console.error(`error: --source must be real or synthetic, got '${values.source}'`);
    return 2;
  }
  if (values.split && values.split !== 'train' && values.split !== 'test') {
    console.error(`error: --split must be train or test, got '${values.split}'`);
    return 2;
  }

  const manifest: ManifestFields = {
    id: values.id,
    source: values.source as ManifestFields['source'],
    class: values.class,
    iteration: values.iteration === undefined ? undefined : Number(values.iteration),
    split: values.split as ManifestFields['split'],
  };
  try {
    const result = await extractFeatures({
      imageDir: values.in,
      outPath: values.out,
      model: values.model,
      batchSize: values.batch === undefined ? undefined : Number(values.batch),
      imageSize: values['image-size'] === undefined ? undefined : Number(values['image-size']),
      manifest,
    });
    console.log(
      `wrote ${result.fvecPath} (count=${result.count}, dim=${result.dim}, ` +
        `model=${result.model}); sidecar ${result.sidecarPath}` +
        (result.skipped.length ? `; skipped ${result.skipped.length} file(s)` : ''),
    );
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

if (require.main === module) {
  main(process.argv.slice(2)).then(code => {
    process.exitCode = code;
  });
}
