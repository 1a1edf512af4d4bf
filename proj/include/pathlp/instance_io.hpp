#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pathlp/lp.hpp"
#include "pathlp/trace.hpp"

namespace pathlp {

// Full-precision decimal rendering; 17 significant digits round-trip a
// double exactly.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct LoadedInstance {
  LpInstance lp;
  std::optional<LpParameters> params;
};

namespace io_detail {

struct Token {
  std::string text;
  std::size_t line;
};

inline std::vector<Token> tokenize(std::istream& in) {
  std::vector<Token> tokens;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string word;
    while (ls >> word) {
      if (word[0] == '#') break;  // comment to end of line
      tokens.push_back({word, line_no});
    }
  }
  return tokens;
}

class TokenReader {
 public:
  explicit TokenReader(std::vector<Token> tokens)
      : tokens_(std::move(tokens)) {}

  bool done() const { return pos_ >= tokens_.size(); }

  const Token& peek() const {
    if (done()) throw ParseError("unexpected end of file");
    return tokens_[pos_];
  }

  Token next() {
    if (done()) throw ParseError("unexpected end of file");
    return tokens_[pos_++];
  }

  void expect_keyword(const std::string& kw) {
    Token tok = next();
    if (tok.text != kw)
      throw ParseError("line " + std::to_string(tok.line) + ": expected '" +
                       kw + "', found '" + tok.text + "'");
  }

  std::size_t next_count(const std::string& field) {
    Token tok = next();
    try {
      const long long v = std::stoll(tok.text);
      if (v <= 0) throw std::invalid_argument("nonpositive");
      return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(tok.line) + ": field '" +
                       field + "' expects a positive integer, found '" +
                       tok.text + "'");
    }
  }

  double next_double(const std::string& field) {
    Token tok = next();
    try {
      std::size_t used = 0;
      const double v = std::stod(tok.text, &used);
      if (used != tok.text.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(tok.line) + ": field '" +
                       field + "' expects a number, found '" + tok.text + "'");
    }
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace io_detail

inline LoadedInstance load_instance(std::istream& in) {
  io_detail::TokenReader reader(io_detail::tokenize(in));
  reader.expect_keyword("rows");
  const std::size_t d = reader.next_count("rows");
  reader.expect_keyword("cols");
  const std::size_t n = reader.next_count("cols");

  reader.expect_keyword("A");
  DenseMatrix a(d, n);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = reader.next_double("A");
  reader.expect_keyword("b");
  Vector b(d);
  for (std::size_t i = 0; i < d; ++i) b[i] = reader.next_double("b");
  reader.expect_keyword("c");
  Vector c(n);
  for (std::size_t j = 0; j < n; ++j) c[j] = reader.next_double("c");

  std::optional<LpParameters> params;
  if (!reader.done()) {
    reader.expect_keyword("params");
    LpParameters p;
    bool have_r = false, have_R = false, have_L = false;
    while (!reader.done()) {
      io_detail::Token key = reader.next();
      if (key.text == "r") {
        p.inner_radius = reader.next_double("r");
        have_r = true;
      } else if (key.text == "R") {
        p.outer_radius = reader.next_double("R");
        have_R = true;
      } else if (key.text == "L") {
        p.lipschitz = reader.next_double("L");
        have_L = true;
      } else {
        throw ParseError("line " + std::to_string(key.line) +
                         ": unknown params field '" + key.text + "'");
      }
    }
    if (!have_r || !have_R)
      throw ParseError("params section requires both r and R");
    if (!have_L) p.lipschitz = norm2(c);
    params = p;
  }

  return LoadedInstance{LpInstance(std::move(a), std::move(b), std::move(c)),
                        params};
}

inline LoadedInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file '" + path + "'");
  try {
    return load_instance(in);
  } catch (const ParseError& err) {
    throw ParseError(path + ": " + err.what());
  }
}

inline void save_instance(std::ostream& out, const LpInstance& lp,
                          const std::optional<LpParameters>& params = {}) {
  out << "rows " << lp.num_constraints() << "\n";
  out << "cols " << lp.num_variables() << "\n";
  out << "A\n";
  for (std::size_t i = 0; i < lp.num_constraints(); ++i) {
    for (std::size_t j = 0; j < lp.num_variables(); ++j) {
      if (j) out << ' ';
      out << format_double(lp.a()(i, j));
    }
    out << "\n";
  }
  out << "b\n";
  for (std::size_t i = 0; i < lp.num_constraints(); ++i) {
    if (i) out << ' ';
    out << format_double(lp.b()[i]);
  }
  out << "\nc\n";
  for (std::size_t j = 0; j < lp.num_variables(); ++j) {
    if (j) out << ' ';
    out << format_double(lp.c()[j]);
  }
  out << "\n";
  if (params) {
    out << "params\n";
    out << "r " << format_double(params->inner_radius) << "\n";
    out << "R " << format_double(params->outer_radius) << "\n";
    out << "L " << format_double(params->lipschitz) << "\n";
  }
}

inline void save_instance(const std::string& path, const LpInstance& lp,
                          const std::optional<LpParameters>& params = {}) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  save_instance(out, lp, params);
  out.flush();
  if (!out) throw ParseError("write to '" + path + "' failed");
}

// Streams solver iterations as comma-separated rows. The header is written
// once on construction; rows are flushed when the writer is closed.
class TraceWriter {
 public:
  explicit TraceWriter(std::ostream& out) : out_(&out) { write_header(); }

  void write(const TraceRecord& rec) {
    ++rows_;
    (*out_) << rec.iter << ',' << rec.phase << ',' << format_double(rec.t)
            << ',' << format_double(rec.l2_centrality) << ','
            << format_double(rec.phi) << ',' << format_double(rec.gap) << ','
            << rec.update_rank << ',' << (rec.snapshot_refresh ? 1 : 0)
            << '\n';
    if (!(*out_)) throw Error("trace write failed");
  }

  TraceSink sink() {
    return [this](const TraceRecord& rec) { write(rec); };
  }

  std::size_t rows() const { return rows_; }

  void close() {
    out_->flush();
    if (!(*out_)) throw Error("trace flush failed");
  }

 private:
  void write_header() {
    (*out_) << "iter,phase,t,l2_centrality,phi,gap,update_rank,"
               "snapshot_refresh\n";
  }

  std::ostream* out_;
  std::size_t rows_ = 0;
};

}  // namespace pathlp
