#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "amrlin/pipeline.hpp"

using namespace amrlin;
namespace fs = std::filesystem;

namespace {
constexpr const char* kPermitRecord =
    "# ::id civil.1\n# ::snt No abuse of rights is permitted.\n"
    "(p / permit-01 :polarity - :ARG1 (a / abuse-01 :ARG1 (r / right-05)))\n";

class Pipeline : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("amrlin_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) + "_" +
                std::to_string(::getpid()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path file(const std::string& name, const std::string& content) const {
        fs::path p = dir_ / name;
        std::ofstream(p) << content;
        return p;
    }
    fs::path path(const std::string& name) const { return dir_ / name; }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    static int cli(const std::string& args) {
        std::string cmd = std::string(AMRLIN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
        int rc = std::system(cmd.c_str());
        return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    }

    fs::path dir_;
    std::ostringstream out_, log_;
};
}  // namespace

TEST_F(Pipeline, PreprocessPermit) {
    PreprocessPaths p{file("in.amr", kPermitRecord), path("t.lin"), path("t.snt"), {}, {}};
    PipelineConfig cfg;
    cfg.min_count = 1;
    ASSERT_EQ(cmd_preprocess(p, cfg, out_, log_), kExitOk);
    EXPECT_EQ(slurp(path("t.lin")), "permit-01 :polarity - - :ARG1 abuse-01 :ARG1 right-05 right-05 abuse-01 permit-01\n");
    EXPECT_EQ(slurp(path("t.snt")), "No abuse of rights is permitted.\n");
    EXPECT_EQ(slurp(path("t.lin.ids")), "civil.1\n");
    EXPECT_TRUE(fs::exists(path("t.lin.vocab")));
    EXPECT_TRUE(fs::exists(path("t.snt.vocab")));
}

TEST_F(Pipeline, PreprocessReplacesRareTokens) {
    PreprocessPaths p{file("in.amr", kPermitRecord), path("t.lin"), path("t.snt"), {}, {}};
    ASSERT_EQ(cmd_preprocess(p, PipelineConfig{}, out_, log_), kExitOk);  // min_count 2
    EXPECT_EQ(slurp(path("t.lin")), "permit-01 :polarity - - :ARG1 abuse-01 :ARG1 right-05 right-05 abuse-01 permit-01\n");
    EXPECT_EQ(slurp(path("t.snt")), "<<unk>> <<unk>> <<unk>> <<unk>> <<unk>> <<unk>>\n");
}

TEST_F(Pipeline, PreprocessEmptyCorpusWarns) {
    PreprocessPaths p{file("in.amr", ""), path("t.lin"), path("t.snt"), {}, {}};
    ASSERT_EQ(cmd_preprocess(p, PipelineConfig{}, out_, log_), kExitOk);
    EXPECT_NE(log_.str().find("no records"), std::string::npos);
    EXPECT_EQ(slurp(path("t.lin")), "");
    EXPECT_EQ(slurp(path("t.snt")), "");
}

TEST_F(Pipeline, StrictPreprocessRejectsCorruptRecord) {
    std::string corrupt = std::string(kPermitRecord) + "\n# ::snt broken\n(c / cat :ARG0\n";
    fs::path in = file("in.amr", corrupt);
    EXPECT_NE(cli("preprocess " + in.string() + " --strict --seqs " + path("a.lin").string() + " --snts " +
                  path("a.snt").string()),
              0);
    EXPECT_FALSE(fs::exists(path("a.lin")));
    EXPECT_EQ(cli("preprocess " + in.string() + " --seqs " + path("b.lin").string() + " --snts " +
                  path("b.snt").string()),
              0);
    EXPECT_EQ(slurp(path("b.lin")).size(), slurp(path("b.lin")).find('\n') + 1);  // one line
}

TEST_F(Pipeline, CliUsageErrors) {
    EXPECT_EQ(cli(""), kExitUsage);
    EXPECT_EQ(cli("frobnicate"), kExitUsage);
    EXPECT_EQ(cli("smatch " + path("missing.amr").string() + " " + path("missing.amr").string()), kExitUsage);
    EXPECT_EQ(cli("--help"), kExitOk);
}

TEST_F(Pipeline, DelinearizeCleanInputHasNoDiagnostics) {
    fs::path seqs = file("t.lin",
                         "permit-01 :polarity - - :ARG1 abuse-01 :ARG1 right-05 right-05 abuse-01 permit-01\n"
                         "dog dog\n");
    DelinearizePaths p{seqs, path("out.amr"), {}, path("diag.tsv")};
    ASSERT_EQ(cmd_delinearize(p, PipelineConfig{}, out_, log_), kExitOk);
    EXPECT_EQ(slurp(path("diag.tsv")), "");
    CorpusReadResult r = read_corpus(path("out.amr"), true);
    ASSERT_EQ(r.records.size(), 2u);
    EXPECT_EQ(serialize_penman(r.records[0].graph),
              "(x0 / permit-01 :polarity - :ARG1 (x1 / abuse-01 :ARG1 (x2 / right-05)))");
}

TEST_F(Pipeline, DelinearizeRepairsAndReports) {
    fs::path seqs = file("t.lin", "dog :ARG0 cat\n:ARG0 dog dog\n");
    DelinearizePaths p{seqs, path("out.amr"), file("t.ids", "a\nb\n"), path("diag.tsv")};
    ASSERT_EQ(cmd_delinearize(p, PipelineConfig{}, out_, log_), kExitOk);
    std::string diag = slurp(path("diag.tsv"));
    EXPECT_NE(diag.find("1\tsyntax-error\timplicit-close\t3\t"), std::string::npos) << diag;
    EXPECT_NE(diag.find("2\tsyntax-error\tdropped-token\t0\t"), std::string::npos) << diag;
    CorpusReadResult r = read_corpus(path("out.amr"), true);
    ASSERT_EQ(r.records.size(), 2u);
    EXPECT_EQ(r.records[1].id, "b");
    EXPECT_NE(out_.str().find("repaired_lines\t2"), std::string::npos);

    PipelineConfig strict;
    strict.strict = true;
    try {
        cmd_delinearize(p, strict, out_, log_);
        FAIL() << "strict mode accepted a malformed line";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
    }
}

TEST_F(Pipeline, DelinearizeIdCountMismatch) {
    DelinearizePaths p{file("t.lin", "dog dog\n"), path("out.amr"), file("t.ids", "a\nb\n"), {}};
    EXPECT_THROW(cmd_delinearize(p, PipelineConfig{}, out_, log_), DataError);
}

TEST_F(Pipeline, SmatchGoldAgainstItself) {
    fs::path gold = file("gold.amr", std::string(kPermitRecord) + "\n# ::id dog.1\n# ::snt dog\n(d / dog)\n");
    ASSERT_EQ(cmd_smatch(gold, gold, PipelineConfig{}, out_, log_), kExitOk);
    EXPECT_NE(out_.str().find("civil.1\t1\t1\t1\n"), std::string::npos) << out_.str();
    EXPECT_NE(out_.str().find("aggregate\t1\t1\t1\n"), std::string::npos);
    EXPECT_NE(out_.str().find("mean_f1\t1\n"), std::string::npos);
}

TEST_F(Pipeline, SmatchMismatchesAreDataErrors) {
    fs::path gold = file("gold.amr", "# ::id a\n# ::snt x\n(d / dog)\n\n# ::id b\n# ::snt y\n(c / cat)\n");
    fs::path renamed = file("sys1.amr", "# ::id a\n# ::snt x\n(d / dog)\n\n# ::id z\n# ::snt y\n(c / cat)\n");
    fs::path shorter = file("sys2.amr", "# ::id a\n# ::snt x\n(d / dog)\n");
    EXPECT_THROW(cmd_smatch(gold, renamed, PipelineConfig{}, out_, log_), DataError);
    EXPECT_THROW(cmd_smatch(gold, shorter, PipelineConfig{}, out_, log_), DataError);
    EXPECT_EQ(cli("smatch " + gold.string() + " " + shorter.string()), kExitData);
}

TEST_F(Pipeline, ComposedCommandsMatchInformationLoss) {
    Corpus synth = synthetic_corpus(80, 0.3, 0.4, 17);
    fs::path corpus = path("synth.amr");
    {
        std::ofstream f(corpus);
        write_corpus(f, synth);
    }
    PipelineConfig cfg;
    cfg.min_count = 1;
    std::ostringstream sink;
    ASSERT_EQ(cmd_preprocess({corpus, path("s.lin"), path("s.snt"), {}, {}}, cfg, sink, log_), kExitOk);
    ASSERT_EQ(cmd_delinearize({path("s.lin"), path("back.amr"), path("s.lin.ids"), {}}, cfg, sink, log_), kExitOk);
    ASSERT_EQ(cmd_smatch(corpus, path("back.amr"), cfg, out_, log_), kExitOk);

    std::string text = out_.str();
    std::size_t pos = text.find("mean_f1\t");
    ASSERT_NE(pos, std::string::npos);
    double composed = std::stod(text.substr(pos + 8));
    LossReport direct = information_loss(read_corpus(corpus, true).records, cfg.smatch());
    EXPECT_NEAR(1.0 - composed, direct.loss, 1e-12);

    std::ostringstream loss_out;
    ASSERT_EQ(cmd_loss({corpus}, path("records.tsv"), cfg, loss_out, log_), kExitOk);
    EXPECT_NE(loss_out.str().find("records 80"), std::string::npos);
    EXPECT_NE(loss_out.str().find("information loss " + format_real(direct.loss)), std::string::npos)
        << loss_out.str();
}

TEST_F(Pipeline, DeterministicOutputs) {
    fs::path corpus = path("synth.amr");
    PipelineConfig cfg;
    cfg.seed = 5;
    SynthConfig sc;
    sc.n = 40;
    sc.dup_concept_rate = 0.5;
    std::ostringstream sink;
    ASSERT_EQ(cmd_synth(sc, corpus, cfg, sink, log_), kExitOk);
    std::string first_corpus = slurp(corpus);
    std::ostringstream a, b;
    cmd_loss({corpus}, {}, cfg, a, log_);
    ASSERT_EQ(cmd_synth(sc, corpus, cfg, sink, log_), kExitOk);
    EXPECT_EQ(slurp(corpus), first_corpus);
    cfg.workers = 4;
    cmd_loss({corpus}, {}, cfg, b, log_);
    EXPECT_EQ(a.str(), b.str());
}

TEST_F(Pipeline, StatsAndMultiSplitLoss) {
    fs::path one = file("one.amr", kPermitRecord);
    fs::path two = file("two.amr", "# ::id d\n# ::snt a dog\n(d / dog)\n");
    ASSERT_EQ(cmd_stats({one, two}, PipelineConfig{}, out_, log_), kExitOk);
    EXPECT_NE(out_.str().find("[overall]\nrecords\t2\n"), std::string::npos) << out_.str();
    std::ostringstream loss_out;
    ASSERT_EQ(cmd_loss({one, two}, {}, PipelineConfig{}, loss_out, log_), kExitOk);
    EXPECT_NE(loss_out.str().find("overall: records 2, mean smatch 1, information loss 0"), std::string::npos)
        << loss_out.str();
}
