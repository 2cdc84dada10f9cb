// amrlin: AMR linearization pipeline.
//
//   amrlin preprocess  corpus.amr --seqs train.lin --snts train.snt
//   amrlin delinearize train.lin --out recovered.amr [--ids train.lin.ids]
//   amrlin smatch      gold.amr system.amr
//   amrlin loss        test.amr [dev.amr ...]
//   amrlin stats       test.amr [dev.amr ...]
//   amrlin synth       --n 200 --dup-rate 0.25 --out synth.amr

#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "amrlin/pipeline.hpp"

int main(int argc, char** argv) {
    using namespace amrlin;

    CLI::App app{"AMR graph linearization, de-linearization and SMATCH scoring"};
    app.require_subcommand(1);

    PipelineConfig cfg;
    std::size_t max_vocab = 0;
    bool repair = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
        cmd->add_option("--workers", cfg.workers, "Worker threads")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        auto* strict = cmd->add_flag("--strict", cfg.strict, "Fail on the first malformed record");
        cmd->add_flag("--repair", repair, "Repair malformed input (default)")->excludes(strict);
    };
    auto add_restarts = [&](CLI::App* cmd) {
        cmd->add_option("--restarts", cfg.restarts, "Hill-climbing restarts")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    };

    PreprocessPaths pre;
    auto* preprocess = app.add_subcommand("preprocess", "Linearize a corpus and replace rare tokens");
    preprocess->add_option("corpus", pre.corpus_in, "Input AMR corpus")->required()->check(CLI::ExistingFile);
    preprocess->add_option("--seqs", pre.seqs_out, "Output token sequences, one per line")->required();
    preprocess->add_option("--snts", pre.snts_out, "Output sentences, one per line")->required();
    preprocess->add_option("--vocab", pre.vocab_out, "Output vocabulary (default <seqs>.vocab)");
    preprocess->add_option("--ids", pre.ids_out, "Output record ids (default <seqs>.ids)");
    preprocess->add_option("--min-count", cfg.min_count, "Minimum token frequency")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    preprocess->add_option("--max-vocab", max_vocab, "Vocabulary cap (0 = unlimited)")->capture_default_str();
    add_common(preprocess);

    DelinearizePaths del;
    auto* delin = app.add_subcommand("delinearize", "Recover PENMAN graphs from token sequences");
    delin->add_option("seqs", del.seqs_in, "Token sequences, one per line")->required()->check(CLI::ExistingFile);
    delin->add_option("--out", del.corpus_out, "Output AMR corpus")->required();
    delin->add_option("--ids", del.ids_in, "Record ids, one per line")->check(CLI::ExistingFile);
    delin->add_option("--diagnostics", del.diagnostics_out, "Diagnostics file (default stderr)");
    add_common(delin);

    std::filesystem::path gold, system;
    auto* smatch = app.add_subcommand("smatch", "Score a system corpus against a gold corpus");
    smatch->add_option("gold", gold, "Gold AMR corpus")->required()->check(CLI::ExistingFile);
    smatch->add_option("system", system, "System AMR corpus")->required()->check(CLI::ExistingFile);
    add_restarts(smatch);
    add_common(smatch);

    std::vector<std::filesystem::path> corpora;
    std::filesystem::path records_out;
    auto* loss = app.add_subcommand("loss", "Information loss of the linearization round trip");
    loss->add_option("corpora", corpora, "AMR corpus files (one per split)")->required()->check(CLI::ExistingFile);
    loss->add_option("--records", records_out, "Per-graph (id, F1) output file");
    add_restarts(loss);
    add_common(loss);

    auto* stats = app.add_subcommand("stats", "Dataset statistics");
    stats->add_option("corpora", corpora, "AMR corpus files")->required()->check(CLI::ExistingFile);
    add_common(stats);

    SynthConfig sc;
    std::filesystem::path synth_out;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic AMR corpus");
    synth->add_option("--n", sc.n, "Number of graphs")->capture_default_str();
    synth->add_option("--reentrancy-rate", sc.reentrancy_rate, "Share of graphs with a re-entrancy")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    synth->add_option("--dup-rate", sc.dup_concept_rate, "Chance a node repeats an earlier concept")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    synth->add_option("--max-nodes", sc.shape.max_nodes, "Maximum variable nodes per graph")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    synth->add_option("--out", synth_out, "Output AMR corpus")->required();
    add_common(synth);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }
    cfg.max_vocab = max_vocab == 0 ? kUnlimited : max_vocab;

    auto& out = std::cout;
    auto& log = std::cerr;
    return run_command(
        [&] {
            if (*preprocess) return cmd_preprocess(pre, cfg, out, log);
            if (*delin) return cmd_delinearize(del, cfg, out, log);
            if (*smatch) return cmd_smatch(gold, system, cfg, out, log);
            if (*loss) return cmd_loss(corpora, records_out, cfg, out, log);
            if (*stats) return cmd_stats(corpora, cfg, out, log);
            return cmd_synth(sc, synth_out, cfg, out, log);
        },
        log);
}
