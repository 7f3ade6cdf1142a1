#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "tpid/cli.hpp"

using namespace tpid;

int main(int argc, char** argv) {
  cli::Options o;
  CLI::App app{"Turning-point identification over plot synopses and screenplays"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file; flags given on the command line win");

  app.add_option("--corpus", o.corpus, "corpus JSON");
  app.add_option("--embeddings", o.embeddings, "embedding store (.bin, or .jsonl)");
  app.add_option("--entities", o.entities, "entity word-vector table (binary, or word2vec .txt/.vec)");
  app.add_option("--entity-out", o.entity_out, "hash-embed: also write a hashed entity table here");
  app.add_option("--checkpoint", o.checkpoint, "model checkpoint (sidecar at <path>.json)");
  app.add_option("--synopsis-checkpoint", o.synopsis_checkpoint, "predict screenplay TPs end to end from this synopsis model");
  app.add_option("--stats", o.stats, "position stats JSON, or 'theory'; default fits the train split");
  app.add_option("--predictions", o.predictions, "predictions JSON for eval");
  app.add_option("--input", o.input, "raw screenplay text for split-scenes");
  app.add_option("--out", o.out, "output file or directory");
  app.add_option("--movie", o.movie, "movie id for export-posteriors");
  app.add_option("--which", o.which, "baseline: theory, distribution, random, tfidf, tfidf+distribution");
  app.add_option("--task", o.task, "synopsis or screenplay")->check(CLI::IsMember({"synopsis", "screenplay"}));
  app.add_option("--variant", o.variant, "model variant, e.g. tam, cam, tam+views, tam+entities");
  app.add_option("--split", o.split, "train, dev, test or all");
  app.add_option("--similarity", o.similarity, "literal or euclidean")->check(CLI::IsMember({"literal", "euclidean"}));
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--jobs", o.jobs, "parallel workers for folds and per-movie prediction")->check(CLI::PositiveNumber);
  app.add_option("--folds", o.folds, "cross-validation folds")->check(CLI::PositiveNumber);
  app.add_option("--epochs", o.epochs, "maximum training epochs");
  app.add_option("--patience", o.patience, "early-stopping patience in epochs");
  app.add_option("--lr", o.lr, "Adam learning rate");
  app.add_option("--dropout", o.dropout, "dropout rate");
  app.add_option("--hidden", o.hidden, "LSTM hidden size (0 = model default)");
  app.add_option("--entity-hidden", o.entity_hidden, "entity LSTM hidden size (0 = model default)");
  app.add_option("--window", o.window, "synopsis context window in sentences");
  app.add_option("--window-fraction", o.window_fraction, "screenplay context window as a fraction of scenes");
  app.add_option("--dim", o.dim, "hash-embed dimension");
  app.add_option("--synth-train", o.synth_train, "synth: train movies");
  app.add_option("--synth-dev", o.synth_dev, "synth: dev movies");
  app.add_option("--synth-test", o.synth_test, "synth: test movies");
  app.add_option("--synth-length", o.synth_length, "synth: synopsis sentences");
  app.add_option("--synth-scenes", o.synth_scenes, "synth: scenes per screenplay");
  app.add_option("--synth-jitter", o.synth_jitter, "synth: TP offset from the reference position");

  std::function<cli::CommandResult()> run;
  auto sub = [&](const char* name, const char* help, std::function<cli::CommandResult()> fn) {
    app.add_subcommand(name, help)->callback([&run, fn] { run = fn; });
  };
  sub("stats", "corpus statistics table", [&] { return cli::cmd_stats(o); });
  sub("fit-stats", "fit TP position mean/std on the train split", [&] { return cli::cmd_fit_stats(o); });
  sub("baseline", "run a baseline and evaluate it", [&] { return cli::cmd_baseline(o); });
  sub("train", "train a model and write a checkpoint", [&] { return cli::cmd_train(o, stderr); });
  sub("predict", "predictions, posterior CSVs and highlights", [&] { return cli::cmd_predict(o); });
  sub("eval", "score a predictions file", [&] { return cli::cmd_eval(o); });
  sub("export-posteriors", "posterior CSV with gold column for one movie", [&] { return cli::cmd_export_posteriors(o); });
  sub("crossval", "k-fold cross-validation over gold screenplay movies", [&] { return cli::cmd_crossval(o); });
  sub("hash-embed", "deterministic hashed sentence embeddings", [&] { return cli::cmd_hash_embed(o); });
  sub("synth", "write a planted-signal synthetic corpus", [&] { return cli::cmd_synth(o); });
  sub("split-scenes", "split raw screenplay text into scenes", [&] { return cli::cmd_split_scenes(o); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  try {
    const auto r = run();
    std::fputs(r.summary.c_str(), stdout);
    for (const auto& a : r.artifacts) std::fprintf(stderr, "wrote %s\n", a.c_str());
    return r.exit_code;
  } catch (const InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const ContractError& e) {
    std::fprintf(stderr, "contract violation: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
