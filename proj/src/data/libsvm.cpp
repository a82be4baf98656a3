#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>

#include "csaga/data.hpp"
#include "csaga/error.hpp"

namespace csaga {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
}

std::string_view next_token(std::string_view& rest) {
  std::size_t b = 0;
  while (b < rest.size() && is_space(rest[b])) ++b;
  std::size_t e = b;
  while (e < rest.size() && !is_space(rest[e])) ++e;
  const std::string_view tok = rest.substr(b, e - b);
  rest.remove_prefix(e);
  return tok;
}

bool parse_real(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  if (tok.empty()) return false;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size() && std::isfinite(out);
}

double parse_label(std::string_view tok, bool normalize, std::size_t line) {
  double value = 0.0;
  if (!parse_real(tok, value)) {
    throw ParseError(line, "malformed label '" + std::string(tok) + "'");
  }
  if (!normalize) return value;
  if (value == 1.0) return 1.0;
  if (value == -1.0 || value == 0.0) return -1.0;
  throw ParseError(line, "label '" + std::string(tok) +
                             "' is not binary (expected +1/1 or -1/0)");
}

}  // namespace

Dataset parse_libsvm(std::istream& in, const LibsvmOptions& options) {
  struct Row {
    std::vector<std::uint32_t> idx;
    std::vector<double> val;
    double label;
  };
  std::vector<Row> rows;
  std::size_t max_index = 0;  // 1-based; 0 means no features seen
  std::string buf;
  std::size_t line_no = 0;
  while (std::getline(in, buf)) {
    ++line_no;
    std::string_view rest(buf);
    const std::string_view label_tok = next_token(rest);
    if (label_tok.empty()) continue;  // blank line
    Row row;
    row.label = parse_label(label_tok, options.normalize_binary_labels, line_no);
    std::uint64_t prev = 0;
    for (std::string_view tok = next_token(rest); !tok.empty();
         tok = next_token(rest)) {
      const std::size_t colon = tok.find(':');
      if (colon == std::string_view::npos || colon == 0 || colon + 1 == tok.size()) {
        throw ParseError(line_no, "malformed token '" + std::string(tok) + "'");
      }
      const std::string_view idx_tok = tok.substr(0, colon);
      std::uint64_t index = 0;
      const auto [ptr, ec] =
          std::from_chars(idx_tok.data(), idx_tok.data() + idx_tok.size(), index);
      if (ec != std::errc() || ptr != idx_tok.data() + idx_tok.size()) {
        throw ParseError(line_no, "malformed index in '" + std::string(tok) + "'");
      }
      if (index < 1) {
        throw ParseError(line_no, "index must be >= 1 in '" + std::string(tok) + "'");
      }
      if (index > static_cast<std::uint64_t>(std::numeric_limits<std::int32_t>::max())) {
        throw ParseError(line_no, "index too large in '" + std::string(tok) + "'");
      }
      if (index <= prev) {
        throw ParseError(line_no, "indices not strictly increasing at '" +
                                      std::string(tok) + "'");
      }
      prev = index;
      double value = 0.0;
      if (!parse_real(tok.substr(colon + 1), value)) {
        throw ParseError(line_no, "malformed value in '" + std::string(tok) + "'");
      }
      if (value == 0.0) continue;  // explicit zeros carry no information
      row.idx.push_back(static_cast<std::uint32_t>(index - 1));
      row.val.push_back(value);
      max_index = std::max<std::size_t>(max_index, index);
    }
    rows.push_back(std::move(row));
  }
  std::size_t dim = max_index;
  if (options.dim) {
    if (*options.dim < max_index) {
      throw Error("declared dimension " + std::to_string(*options.dim) +
                  " is smaller than the largest index " + std::to_string(max_index));
    }
    dim = *options.dim;
  }
  std::vector<Sample> samples;
  samples.reserve(rows.size());
  for (auto& r : rows) {
    samples.push_back({SparseVec(dim, std::move(r.idx), std::move(r.val)), r.label});
  }
  return Dataset(std::move(samples), dim);
}

Dataset parse_libsvm_file(const std::string& path, const LibsvmOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset '" + path + "'");
  try {
    return parse_libsvm(in, options);
  } catch (const ParseError& e) {
    throw Error(path + ": " + e.what());
  }
}

void write_libsvm(std::ostream& out, const Dataset& ds) {
  const auto old_prec = out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& s : ds.samples()) {
    out << s.label;
    const auto idx = s.features.indices();
    const auto val = s.features.values();
    for (std::size_t k = 0; k < idx.size(); ++k) {
      out << ' ' << (idx[k] + 1) << ':' << val[k];
    }
    out << '\n';
  }
  out.precision(old_prec);
}

}  // namespace csaga
