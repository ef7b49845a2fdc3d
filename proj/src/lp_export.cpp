// Explicit MILP writer in CPLEX LP format. Slack variables are materialized
// with their natural bounds [0, rhs]; binary-slack blocks put their slacks in
// the Binaries section, the rest go to Generals.

#include <fstream>
#include <sstream>
#include <string>

#include "mapsparse/error.hpp"
#include "mapsparse/solver.hpp"
#include "text_util.hpp"

namespace mapsparse {
namespace {

constexpr std::size_t kLineWidth = 78;

// LP names may not contain '-'; negative ids are written as n<abs>.
std::string sanitize(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    if (c == '-') {
      out += 'n';
    } else {
      out += c;
    }
  }
  return out;
}

std::string landmarkName(LandmarkId id) {
  return id < 0 ? "x_n" + std::to_string(-id) : "x_" + std::to_string(id);
}

std::string rowName(const ConstraintBlock& blk, std::size_t r) {
  if (r < blk.row_names.size()) return sanitize(blk.row_names[r]);
  std::string prefix = blk.name;
  for (char& c : prefix) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return prefix + "_" + std::to_string(r);
}

// Accumulates " + term" pieces and wraps lines at a fixed width.
class LineWriter {
 public:
  explicit LineWriter(std::string& out) : out_(out) {}

  void begin(std::string_view head) {
    out_ += ' ';
    out_ += head;
    col_ = head.size() + 1;
    first_ = true;
  }

  void term(double coef, std::string_view var) {
    std::string piece;
    if (first_) {
      if (coef < 0) piece += "- ";
    } else {
      piece += coef < 0 ? "- " : "+ ";
    }
    const double mag = coef < 0 ? -coef : coef;
    if (mag != 1.0) {
      detail::appendDouble(piece, mag);
      piece += ' ';
    }
    piece += var;
    put(piece);
    first_ = false;
  }

  void raw(std::string_view piece) { put(std::string(piece)); }

  void end() {
    out_ += '\n';
    col_ = 0;
  }

 private:
  void put(const std::string& piece) {
    if (col_ + 1 + piece.size() > kLineWidth && col_ > 0) {
      out_ += "\n  ";
      col_ = 2;
    } else {
      out_ += ' ';
      ++col_;
    }
    out_ += piece;
    col_ += piece.size();
  }

  std::string& out_;
  std::size_t col_ = 0;
  bool first_ = true;
};

}  // namespace

std::string formatLp(const SparsificationProblem& problem, std::string_view comment) {
  problem.validate();
  std::string out;
  std::istringstream lines{std::string(comment)};
  for (std::string line; std::getline(lines, line);) {
    out += "\\ " + line + "\n";
  }

  std::vector<std::string> xs(problem.n);
  for (std::size_t j = 0; j < problem.n; ++j) {
    xs[j] = j < problem.landmark_ids.size()
                ? landmarkName(problem.landmark_ids[j])
                : "x_" + std::to_string(j);
  }

  LineWriter w(out);
  out += "Minimize\n";
  w.begin("obj:");
  bool any = false;
  for (std::size_t j = 0; j < problem.n; ++j) {
    if (problem.weight[j] == 0.0) continue;
    w.term(problem.weight[j], xs[j]);
    any = true;
  }
  for (const auto& blk : problem.blocks) {
    if (blk.penalty == 0.0) continue;
    for (std::size_t r = 0; r < blk.matrix.rows(); ++r) {
      w.term(blk.penalty, "s_" + rowName(blk, r));
      any = true;
    }
  }
  if (!any) w.raw(problem.n > 0 ? "0 " + xs[0] : "0");
  w.end();

  out += "Subject To\n";
  for (const auto& blk : problem.blocks) {
    for (std::size_t r = 0; r < blk.matrix.rows(); ++r) {
      const std::string name = rowName(blk, r);
      w.begin(name + ":");
      for (std::uint32_t c : blk.matrix.row(r)) w.term(1.0, xs[c]);
      w.term(1.0, "s_" + name);
      w.raw(">= " + std::to_string(blk.rhs[r]));
      w.end();
    }
  }

  out += "Bounds\n";
  for (const auto& blk : problem.blocks) {
    if (blk.slack_kind == SlackKind::kBinary) continue;
    for (std::size_t r = 0; r < blk.matrix.rows(); ++r) {
      out += " 0 <= s_" + rowName(blk, r) + " <= " + std::to_string(blk.rhs[r]) + "\n";
    }
  }

  out += "Binaries\n";
  w.begin("");
  for (std::size_t j = 0; j < problem.n; ++j) w.raw(xs[j]);
  for (const auto& blk : problem.blocks) {
    if (blk.slack_kind != SlackKind::kBinary) continue;
    for (std::size_t r = 0; r < blk.matrix.rows(); ++r) w.raw("s_" + rowName(blk, r));
  }
  w.end();

  bool has_generals = false;
  for (const auto& blk : problem.blocks) {
    has_generals |= blk.slack_kind != SlackKind::kBinary && blk.matrix.rows() > 0;
  }
  if (has_generals) {
    out += "Generals\n";
    w.begin("");
    for (const auto& blk : problem.blocks) {
      if (blk.slack_kind == SlackKind::kBinary) continue;
      for (std::size_t r = 0; r < blk.matrix.rows(); ++r) w.raw("s_" + rowName(blk, r));
    }
    w.end();
  }
  out += "End\n";
  return out;
}

void exportLp(const SparsificationProblem& problem, const std::filesystem::path& path,
              std::string_view comment) {
  const std::string text = formatLp(problem, comment);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace mapsparse
