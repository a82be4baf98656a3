#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>
#include <thread>

#include "csaga/bench.hpp"
#include "csaga/error.hpp"

namespace csaga::bench {

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return std::string(s);
}

double parse_number(const std::string& tok) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !(v > 0.0) ||
      !std::isfinite(v)) {
    throw Error("invalid stepsize '" + tok + "'");
  }
  return v;
}

}  // namespace

std::vector<double> default_gamma_grid() {
  std::vector<double> grid;
  for (int e = 13; e >= -14; --e) grid.push_back(std::ldexp(1.0, e));
  return grid;
}

std::vector<double> parse_gamma_grid(std::string_view spec, double L) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const std::size_t comma = spec.find(',', pos);
    const std::string tok =
        trim(spec.substr(pos, comma == std::string_view::npos ? spec.npos : comma - pos));
    if (tok == "default") {
      const auto g = default_gamma_grid();
      out.insert(out.end(), g.begin(), g.end());
    } else if (tok.size() > 2 && tok.ends_with("/L")) {
      out.push_back(parse_number(tok.substr(0, tok.size() - 2)) / L);
    } else if (!tok.empty()) {
      out.push_back(parse_number(tok));
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw Error("empty stepsize grid");
  return out;
}

GridResult evaluate_grid(const FiniteSumProblem& p, const DenseVec& x0,
                         const ReferenceSolution& ref, const RunOptions& base,
                         std::span<const double> gammas, std::size_t threads) {
  if (gammas.empty()) throw Error("grid search: no stepsizes");
  GridResult out;
  out.cells.resize(gammas.size());

  auto run_cell = [&](std::size_t c) {
    GridCell& cell = out.cells[c];
    cell.gamma = gammas[c];
    RunOptions ro = base;
    ro.solver.gamma = gammas[c];
    try {
      cell.result = run(p, x0, ro, ref);
      cell.status = cell.result.diverged ? "diverged" : "ok";
    } catch (const Error&) {
      cell.status = "rejected";
    }
    cell.final_suboptimality = cell.status == "ok"
                                   ? cell.result.trace.back().suboptimality
                                   : std::numeric_limits<double>::infinity();
  };

  const std::size_t workers = std::clamp<std::size_t>(threads, 1, gammas.size());
  if (workers == 1) {
    for (std::size_t c = 0; c < gammas.size(); ++c) run_cell(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < gammas.size(); c = next++) run_cell(c);
      });
    }
  }

  bool found = false;
  for (std::size_t c = 0; c < out.cells.size(); ++c) {
    const GridCell& cell = out.cells[c];
    if (cell.status != "ok") continue;
    if (!found) {
      out.best_index = c;
      found = true;
      continue;
    }
    const GridCell& best = out.cells[out.best_index];
    if (cell.final_suboptimality < best.final_suboptimality ||
        (cell.final_suboptimality == best.final_suboptimality && cell.gamma > best.gamma)) {
      out.best_index = c;
    }
  }
  out.any_ok = found;
  if (found) out.best_gamma = out.cells[out.best_index].gamma;
  return out;
}

GridResult grid_search(const FiniteSumProblem& p, const DenseVec& x0,
                       const ReferenceSolution& ref, const RunOptions& base,
                       std::span<const double> gammas, std::size_t threads) {
  GridResult out = evaluate_grid(p, x0, ref, base, gammas, threads);
  if (!out.any_ok) throw Error("grid search: every stepsize diverged or was rejected");
  return out;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace,
                     bool wall_clock) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << "epoch,grad_evals,gamma,suboptimality,lyapunov,wall_seconds\n";
  for (const auto& r : trace) {
    out << r.epoch << ',' << r.grad_evals << ',' << r.gamma << ',' << r.suboptimality
        << ',';
    if (r.lyapunov) out << *r.lyapunov;
    out << ',' << (wall_clock ? r.wall_seconds : 0.0) << '\n';
  }
  out.precision(old);
}

void write_summary_csv(std::ostream& out, std::vector<SummaryRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
    const bool a_ok = a.status == "ok";
    const bool b_ok = b.status == "ok";
    if (a_ok != b_ok) return a_ok;
    if (a.final_suboptimality != b.final_suboptimality) {
      return a.final_suboptimality < b.final_suboptimality;
    }
    return a.method < b.method;
  });
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << "dataset,method,seed,gamma,final_epoch,final_suboptimality,status\n";
  for (const auto& r : rows) {
    out << r.dataset << ',' << r.method << ',' << r.seed << ',' << r.gamma << ','
        << r.final_epoch << ',' << r.final_suboptimality << ',' << r.status << '\n';
  }
  out.precision(old);
}

}  // namespace csaga::bench
