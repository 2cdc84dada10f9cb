#pragma once

// File-level commands behind the amrlin CLI. Each command takes a config,
// writes its outputs atomically, prints results to `out` and diagnostics to
// `log`, and returns a process exit code.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include <unistd.h>

#include "amrlin/corpus.hpp"
#include "amrlin/linearize.hpp"
#include "amrlin/loss.hpp"
#include "amrlin/smatch.hpp"
#include "amrlin/vocab.hpp"

namespace amrlin {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitData = 2,
    kExitInternal = 3,
};

struct PipelineConfig {
    std::size_t min_count = 2;
    std::size_t max_vocab = kUnlimited;
    int restarts = 4;
    std::uint64_t seed = 13;
    bool strict = false;  // corpus reading and delinearization
    std::size_t workers = 1;

    SmatchOptions smatch() const {
        SmatchOptions o;
        o.restarts = restarts;
        o.seed = seed;
        o.workers = workers;
        return o;
    }
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest decimal that round-trips to the same double.
inline std::string format_real(double x) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

/// Writes to "<path>.tmp.<pid>" and renames over `path` on commit; an
/// uncommitted file is removed.
class AtomicFile {
public:
    explicit AtomicFile(std::filesystem::path path)
        : path_(std::move(path)),
          tmp_(path_.string() + ".tmp." + std::to_string(::getpid())),
          stream_(tmp_, std::ios::binary | std::ios::trunc) {
        if (!stream_) throw std::runtime_error("cannot write " + tmp_.string());
    }
    AtomicFile(const AtomicFile&) = delete;
    AtomicFile& operator=(const AtomicFile&) = delete;
    ~AtomicFile() {
        if (!committed_) {
            stream_.close();
            std::error_code ec;
            std::filesystem::remove(tmp_, ec);
        }
    }

    std::ostream& stream() { return stream_; }

    void commit() {
        stream_.close();
        if (!stream_) throw std::runtime_error("write failed for " + path_.string());
        std::filesystem::rename(tmp_, path_);
        committed_ = true;
    }

private:
    std::filesystem::path path_, tmp_;
    std::ofstream stream_;
    bool committed_ = false;
};

namespace detail {

inline CorpusReadResult load_corpus(const std::filesystem::path& path, bool strict, std::ostream& log) {
    CorpusReadResult r = read_corpus(path, strict);
    for (const ReadWarning& w : r.warnings)
        log << "warning: " << path.string() << ": record " << w.record << " (line " << w.line
            << "): " << w.message << '\n';
    return r;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) {
        if (!l.empty() && l.back() == '\r') l.pop_back();
        lines.push_back(std::move(l));
    }
    return lines;
}

}  // namespace detail

struct PreprocessPaths {
    std::filesystem::path corpus_in;
    std::filesystem::path seqs_out;
    std::filesystem::path snts_out;
    std::filesystem::path vocab_out;  // empty: <seqs_out>.vocab
    std::filesystem::path ids_out;    // empty: <seqs_out>.ids
};

/// Linearizes every graph, replaces infrequent tokens on both sides with
/// "<<unk>>", and writes line-aligned sequence, sentence and id files plus
/// the target vocabulary (the source vocabulary goes to <snts_out>.vocab).
inline int cmd_preprocess(const PreprocessPaths& paths, const PipelineConfig& cfg, std::ostream& out,
                          std::ostream& log) {
    CorpusReadResult read = detail::load_corpus(paths.corpus_in, cfg.strict, log);
    const Corpus& corpus = read.records;
    if (corpus.empty()) log << "warning: " << paths.corpus_in.string() << ": no records\n";

    std::vector<TokenSeq> targets(corpus.size()), sources(corpus.size());
    parallel_for(corpus.size(), cfg.workers, [&](std::size_t i) {
        targets[i] = linearize(corpus[i].graph);
        sources[i] = TokenSeq::parse(corpus[i].sentence);
    });
    for (std::size_t i = 0; i < corpus.size(); ++i)
        for (const std::string& label : whitespace_labels(corpus[i].graph))
            log << "warning: record " << i + 1 << ": label " << label
                << " contains whitespace; linearized with '_'\n";

    VocabTable target_vocab = build_vocab(targets, cfg.min_count, cfg.max_vocab);
    VocabTable source_vocab = build_vocab(sources, cfg.min_count, cfg.max_vocab);

    auto vocab_path = paths.vocab_out.empty() ? std::filesystem::path(paths.seqs_out.string() + ".vocab")
                                              : paths.vocab_out;
    auto ids_path = paths.ids_out.empty() ? std::filesystem::path(paths.seqs_out.string() + ".ids")
                                          : paths.ids_out;
    AtomicFile seqs(paths.seqs_out), snts(paths.snts_out), vocab(vocab_path), ids(ids_path),
        src_vocab(paths.snts_out.string() + ".vocab");
    std::size_t replaced = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        TokenSeq t = apply_vocab(targets[i], target_vocab);
        for (const auto& tok : t.tokens) replaced += tok == kUnkToken;
        seqs.stream() << t.str() << '\n';
        snts.stream() << apply_vocab(sources[i], source_vocab).str() << '\n';
        ids.stream() << corpus[i].id << '\n';
    }
    target_vocab.write(vocab.stream());
    source_vocab.write(src_vocab.stream());
    seqs.commit();
    snts.commit();
    vocab.commit();
    ids.commit();
    src_vocab.commit();

    out << "records\t" << corpus.size() << '\n'
        << "target_vocab\t" << target_vocab.entries().size() << '\n'
        << "source_vocab\t" << source_vocab.entries().size() << '\n'
        << "target_unk_replacements\t" << replaced << '\n';
    return kExitOk;
}

struct DelinearizePaths {
    std::filesystem::path seqs_in;
    std::filesystem::path corpus_out;
    std::filesystem::path ids_in;          // optional; one id per line
    std::filesystem::path diagnostics_out; // optional; default: log stream
};

/// One PENMAN record per input line. Diagnostics are tab-separated:
///   line  category  kind  token  message
/// with category "node-collision" or "syntax-error".
inline int cmd_delinearize(const DelinearizePaths& paths, const PipelineConfig& cfg, std::ostream& out,
                           std::ostream& log) {
    std::vector<std::string> lines = detail::read_lines(paths.seqs_in);
    std::vector<std::string> ids;
    if (!paths.ids_in.empty()) {
        ids = detail::read_lines(paths.ids_in);
        if (ids.size() != lines.size())
            throw DataError("id file has " + std::to_string(ids.size()) + " lines, sequence file has " +
                            std::to_string(lines.size()));
    }
    DelinearizeMode mode = cfg.strict ? DelinearizeMode::Strict : DelinearizeMode::Repair;

    std::vector<std::optional<DelinearizeResult>> results(lines.size());
    std::vector<std::string> errors(lines.size());
    parallel_for(lines.size(), cfg.workers, [&](std::size_t i) {
        try {
            results[i] = delinearize(TokenSeq::parse(lines[i]), mode);
        } catch (const DelinearizeError& e) {
            errors[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < lines.size(); ++i)
        if (!results[i]) throw DataError("line " + std::to_string(i + 1) + ": " + errors[i]);

    std::optional<AtomicFile> diag_file;
    if (!paths.diagnostics_out.empty()) diag_file.emplace(paths.diagnostics_out);
    std::ostream& diag = diag_file ? diag_file->stream() : log;

    AtomicFile corpus(paths.corpus_out);
    std::size_t syntax = 0, collisions = 0, repaired_lines = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const DelinearizeResult& r = *results[i];
        for (const Diagnostic& d : r.diagnostics) {
            (d.is_syntax_error() ? syntax : collisions) += 1;
            diag << i + 1 << '\t' << (d.is_syntax_error() ? "syntax-error" : "node-collision") << '\t'
                 << to_string(d.kind) << '\t' << d.token_index << '\t' << d.message << '\n';
        }
        repaired_lines += r.has_syntax_errors();
        write_record(corpus.stream(), {ids.empty() ? std::string() : ids[i], {}, {}, r.graph, {}});
    }
    corpus.commit();
    if (diag_file) diag_file->commit();

    out << "lines\t" << lines.size() << '\n'
        << "repaired_lines\t" << repaired_lines << '\n'
        << "syntax_error_repairs\t" << syntax << '\n'
        << "node_collisions\t" << collisions << '\n';
    return kExitOk;
}

/// Per-pair "id P R F1" lines, then "aggregate" (micro-averaged) and
/// "mean_f1" lines. Records are paired by position; when both sides carry
/// ids they must agree.
inline int cmd_smatch(const std::filesystem::path& gold_path, const std::filesystem::path& system_path,
                      const PipelineConfig& cfg, std::ostream& out, std::ostream& log) {
    Corpus gold = detail::load_corpus(gold_path, true, log).records;
    Corpus system = detail::load_corpus(system_path, true, log).records;
    if (gold.size() != system.size())
        throw DataError("record count mismatch: gold " + std::to_string(gold.size()) + ", system " +
                        std::to_string(system.size()));
    if (gold.empty()) throw DataError("no records to score");
    std::vector<std::pair<AmrGraph, AmrGraph>> pairs;
    pairs.reserve(gold.size());
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (!gold[i].id.empty() && !system[i].id.empty() && gold[i].id != system[i].id)
            throw DataError("record " + std::to_string(i + 1) + ": id mismatch (gold '" + gold[i].id +
                            "', system '" + system[i].id + "')");
        pairs.emplace_back(gold[i].graph, system[i].graph);
    }
    CorpusScore score = corpus_smatch(pairs, cfg.smatch());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const ScoreReport& r = score.per_pair[i];
        std::string id = gold[i].id.empty() ? std::to_string(i + 1) : gold[i].id;
        out << id << '\t' << format_real(r.precision) << '\t' << format_real(r.recall) << '\t'
            << format_real(r.f1) << '\n';
    }
    const ScoreReport& agg = score.aggregate;
    out << "aggregate\t" << format_real(agg.precision) << '\t' << format_real(agg.recall) << '\t'
        << format_real(agg.f1) << '\n'
        << "mean_f1\t" << format_real(score.mean_f1) << '\n';
    return kExitOk;
}

/// Information loss per corpus file (split) and over all of them. Per-graph
/// "id f1" records go to `records_out` when given.
inline int cmd_loss(const std::vector<std::filesystem::path>& corpora, const std::filesystem::path& records_out,
                    const PipelineConfig& cfg, std::ostream& out, std::ostream& log) {
    Corpus all;
    std::vector<std::pair<std::string, LossReport>> splits;
    for (const auto& path : corpora) {
        Corpus c = detail::load_corpus(path, cfg.strict, log).records;
        if (c.empty()) throw DataError(path.string() + ": no records");
        splits.emplace_back(path.string(), information_loss(c, cfg.smatch()));
        for (auto& r : c) all.push_back(std::move(r));
    }
    LossReport total = information_loss(all, cfg.smatch());

    if (!records_out.empty()) {
        AtomicFile f(records_out);
        for (const auto& [id, f1] : total.per_graph) f.stream() << id << '\t' << format_real(f1) << '\n';
        f.commit();
    }
    for (const auto& [name, rep] : splits)
        out << name << ": records " << rep.n << ", mean smatch " << format_real(rep.mean_smatch)
            << ", information loss " << format_real(rep.loss) << '\n';
    if (splits.size() > 1)
        out << "overall: records " << total.n << ", mean smatch " << format_real(total.mean_smatch)
            << ", information loss " << format_real(total.loss) << '\n';
    return kExitOk;
}

inline void print_stats(std::ostream& out, const std::string& name, const CorpusStats& s) {
    out << "[" << name << "]\n"
        << "records\t" << s.records << '\n'
        << "sentence_tokens\t" << s.sentence_tokens << '\n'
        << "mean_sentence_tokens\t" << format_real(s.mean_sentence_tokens()) << '\n'
        << "variable_nodes\t" << s.variable_nodes << '\n'
        << "constant_nodes\t" << s.constant_nodes << '\n'
        << "edges\t" << s.edges << '\n'
        << "concept_vocabulary\t" << s.concept_vocabulary << '\n'
        << "linearized_tokens\t" << s.linearized_tokens << '\n'
        << "reentrant_edges\t" << s.reentrant_edges << '\n'
        << "reentrancy_rate\t" << format_real(s.reentrancy_rate()) << '\n'
        << "duplicate_concept_rate\t" << format_real(s.duplicate_concept_rate()) << '\n';
}

inline int cmd_stats(const std::vector<std::filesystem::path>& corpora, const PipelineConfig& cfg,
                     std::ostream& out, std::ostream& log) {
    Corpus all;
    for (const auto& path : corpora) {
        Corpus c = detail::load_corpus(path, cfg.strict, log).records;
        print_stats(out, path.string(), corpus_stats(c));
        for (auto& r : c) all.push_back(std::move(r));
    }
    if (corpora.size() > 1) print_stats(out, "overall", corpus_stats(all));
    return kExitOk;
}

struct SynthConfig {
    std::size_t n = 100;
    double reentrancy_rate = 0;
    double dup_concept_rate = 0;
    SynthOptions shape;
};

inline int cmd_synth(const SynthConfig& sc, const std::filesystem::path& corpus_out, const PipelineConfig& cfg,
                     std::ostream& out, std::ostream&) {
    Corpus c = synthetic_corpus(sc.n, sc.reentrancy_rate, sc.dup_concept_rate, cfg.seed, sc.shape);
    AtomicFile f(corpus_out);
    write_corpus(f.stream(), c);
    f.commit();
    out << "records\t" << c.size() << '\n';
    return kExitOk;
}

/// Maps exceptions escaping a command onto exit codes.
template <class Fn>
int run_command(Fn&& fn, std::ostream& log) {
    try {
        return fn();
    } catch (const GraphError& e) {
        log << "internal error: " << e.what() << '\n';
        return kExitInternal;
    } catch (const std::logic_error& e) {
        log << "internal error: " << e.what() << '\n';
        return kExitInternal;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kExitData;
    }
}

}  // namespace amrlin
