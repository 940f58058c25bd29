import yargs from "yargs";
import { renderAll } from "./all.js";
import { PlotsError } from "./csv.js";
import { loadSpec } from "./figspec.js";
import { renderFigure } from "./render.js";

export async function main(argv: string[]): Promise<number> {
  let exitCode = 0;
  const parser = yargs(argv)
    .scriptName("plots")
    .command(
      "render",
      "render one figure from a JSON spec file",
      (cmd) =>
        cmd.option("spec", {
          type: "string",
          demandOption: true,
          describe: "path to a figure spec (kind/input/output/filter/axes)",
        }),
      (args) => {
        const result = renderFigure(loadSpec(args.spec));
        console.log(`wrote ${result.svgPath} (${result.rowCount} rows, sidecar ${result.sidecarPath})`);
      },
    )
    .command(
      "all",
      "render the standard figure set from a results directory",
      (cmd) =>
        cmd
          .option("results", {
            type: "string",
            demandOption: true,
            describe: "directory holding <experiment>/results.csv outputs",
          })
          .option("out", {
            type: "string",
            default: "figures",
            describe: "directory for the rendered figures",
          }),
      (args) => {
        const results = renderAll(args.results, args.out);
        for (const result of results) {
          console.log(`wrote ${result.svgPath} (${result.rowCount} rows)`);
        }
      },
    )
    .demandCommand(1, "specify a command: render or all")
    .strict()
    .fail((msg, err) => {
      if (err instanceof PlotsError) {
        console.error(`plots: ${err.message}`);
      } else if (err) {
        throw err;
      } else {
        console.error(`plots: ${msg}`);
      }
      exitCode = 1;
    })
    .exitProcess(false);

  try {
    await parser.parse();
  } catch (err) {
    if (err instanceof PlotsError) {
      console.error(`plots: ${err.message}`);
      exitCode = 1;
    } else {
      throw err;
    }
  }
  return exitCode;
}

