#!/usr/bin/env node
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { runExport } from "./exporter.js";

await yargs(hideBin(process.argv))
  .scriptName("embed-export")
  .command(
    "export",
    "embed a CSV column and write exchange JSONL",
    (cmd) =>
      cmd
        .option("input", {
          type: "string",
          demandOption: true,
          describe: "input CSV with an id column and text columns",
        })
        .option("field", {
          type: "string",
          demandOption: true,
          describe: 'text column, or a "+"-join like topic+key_point',
        })
        .option("model", {
          type: "string",
          default: "hash/256",
          describe: 'encoder id: "hash/<dim>" built-in, else a transformers model',
        })
        .option("max-len", {
          type: "number",
          default: 70,
          describe: "token cap per text before encoding",
        })
        .option("pool", {
          choices: ["mean", "none"] as const,
          default: "mean" as const,
          describe: 'one pooled vector per row, or "none" for per-token records',
        })
        .option("out", {
          type: "string",
          demandOption: true,
          describe: "output JSONL path (written atomically)",
        }),
    async (argv) => {
      const summary = await runExport({
        input: argv.input,
        field: argv.field,
        model: argv.model,
        maxLen: argv["max-len"],
        pool: argv.pool,
        out: argv.out,
      });
      console.log(`wrote ${summary.records} records (dim ${summary.dim}) to ${argv.out}`);
    },
  )
  .demandCommand(1)
  .strict()
  .fail((msg, err) => {
    console.error(`error: ${err ? err.message : msg}`);
    process.exit(1);
  })
  .parseAsync();
