#pragma once

// AMR release layout: blank-line separated records, "#" metadata lines
// ("# ::id ...", "# ::snt ...") followed by one PENMAN graph.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "amrlin/graph.hpp"
#include "amrlin/penman.hpp"

namespace amrlin {

struct CorpusRecord {
    std::string id;
    std::string sentence;
    std::vector<std::string> metadata;  // "#" lines other than ::id and ::snt, verbatim
    AmrGraph graph;
    std::string raw_text;  // the whole record block as read
};

using Corpus = std::vector<CorpusRecord>;

struct ReadWarning {
    std::size_t record;  // 1-based, counting blocks that carry a graph
    std::size_t line;    // 1-based line where the record starts
    std::string message;
};

struct CorpusReadResult {
    Corpus records;
    std::vector<ReadWarning> warnings;
};

class CorpusError : public std::runtime_error {
public:
    CorpusError(const std::string& what, std::size_t record, std::size_t line)
        : std::runtime_error("record " + std::to_string(record) + " (line " +
                             std::to_string(line) + "): " + what),
          record_(record) {}
    std::size_t record() const { return record_; }

private:
    std::size_t record_;
};

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

// Value of "::key" inside a metadata line, up to the next "::" field.
inline std::optional<std::string> metadata_field(std::string_view line, std::string_view key,
                                                 bool whole_line) {
    std::string marker = "::" + std::string(key);
    std::size_t pos = line.find(marker);
    if (pos == std::string_view::npos) return std::nullopt;
    std::size_t after = pos + marker.size();
    if (after < line.size() && !std::isspace(static_cast<unsigned char>(line[after])))
        return std::nullopt;
    std::string_view rest = line.substr(after);
    if (!whole_line) {
        std::size_t next = rest.find(" ::");
        if (next != std::string_view::npos) rest = rest.substr(0, next);
    }
    return trim(rest);
}

}  // namespace detail

/// Reads records in file order. Malformed graphs are skipped with a warning,
/// or abort with CorpusError when strict. Blocks without any graph lines
/// (such as a release header) are ignored.
inline CorpusReadResult read_corpus(std::istream& in, bool strict = false) {
    CorpusReadResult result;
    std::vector<std::string> block;
    std::size_t block_line = 0, line_no = 0, record_no = 0;

    auto flush = [&] {
        if (block.empty()) return;
        std::string id, sentence, graph_text, raw;
        bool have_snt = false, have_id = false;
        std::vector<std::string> meta;
        for (const std::string& l : block) {
            raw += l + '\n';
            std::string t = detail::trim(l);
            if (t.starts_with("#")) {
                bool used = false;
                if (auto v = detail::metadata_field(t, "id", false)) {
                    id = *v;
                    have_id = used = true;
                }
                if (auto v = detail::metadata_field(t, "snt", true)) {
                    sentence = *v;
                    have_snt = used = true;
                }
                if (!used) meta.push_back(l);
            } else {
                graph_text += l + '\n';
            }
        }
        std::size_t start = block_line;
        block.clear();
        if (detail::trim(graph_text).empty()) {
            if (have_id || have_snt)
                result.warnings.push_back({record_no + 1, start, "record has no graph; skipped"});
            return;
        }
        ++record_no;
        try {
            AmrGraph g = parse_penman(graph_text);
            if (!have_snt)
                result.warnings.push_back({record_no, start, "missing ::snt; using empty sentence"});
            result.records.push_back(
                {std::move(id), std::move(sentence), std::move(meta), std::move(g), std::move(raw)});
        } catch (const ParseError& e) {
            if (strict) throw CorpusError(e.what(), record_no, start);
            result.warnings.push_back({record_no, start, std::string(e.what()) + "; skipped"});
        }
    };

    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) {
            flush();
            continue;
        }
        if (block.empty()) block_line = line_no;
        block.push_back(line);
    }
    flush();
    return result;
}

inline CorpusReadResult read_corpus(const std::filesystem::path& path, bool strict = false) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_corpus(in, strict);
}

inline void write_record(std::ostream& out, const CorpusRecord& r) {
    if (!r.id.empty()) out << "# ::id " << r.id << '\n';
    out << "# ::snt" << (r.sentence.empty() ? "" : " ") << r.sentence << '\n';
    for (const std::string& m : r.metadata) out << m << '\n';
    out << serialize_penman(r.graph, true) << "\n\n";
}

inline void write_corpus(std::ostream& out, const Corpus& corpus) {
    for (const CorpusRecord& r : corpus) write_record(out, r);
}

}  // namespace amrlin
