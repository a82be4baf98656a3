#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "csaga/bench.hpp"
#include "csaga/error.hpp"

namespace csaga::bench {

namespace {

std::string percent_tag(double fraction) {
  std::ostringstream os;
  os << "_p" << fraction * 100.0;
  return os.str();
}

GradientPath resolve_path(const SuiteConfig& cfg, const FiniteSumProblem& p,
                          MethodKind method) {
  if (cfg.path) return *cfg.path;
  if (p.is_glm() && supports_jit(method) && !cfg.diagnostics) {
    return GradientPath::composite;
  }
  return GradientPath::literal;
}

std::filesystem::path trace_path(const SuiteConfig& cfg, const std::string& tag,
                                 MethodKind method, std::uint64_t seed,
                                 const char* suffix = "") {
  std::string name = tag + "_" + std::string(to_string(method));
  if (cfg.seeds.size() > 1) name += "_s" + std::to_string(seed);
  return cfg.out_dir / (name + suffix + ".csv");
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

LoadedProblem load_problem(const ProblemSpec& spec, const CacheOptions& cache) {
  std::shared_ptr<const Dataset> data;
  std::string tag;
  const bool logistic = spec.loss == LossKind::logistic;

  if (spec.data_path) {
    LibsvmOptions opt;
    opt.normalize_binary_labels = logistic;
    opt.dim = spec.dim;
    Dataset ds;
    if (*spec.data_path == "-") {
      ds = parse_libsvm(std::cin, opt);
      tag = "stdin";
    } else {
      ds = parse_libsvm_file(*spec.data_path, opt);
      tag = std::filesystem::path(*spec.data_path).stem().string();
    }
    if (spec.scale_maxabs) ds = ds.maxabs_scaled();
    data = std::make_shared<const Dataset>(subsample(ds, spec.subsample, spec.data_seed));
  } else {
    switch (spec.synthetic) {
      case SyntheticKind::none:
        throw Error("no problem given: pass --data or --synthetic");
      case SyntheticKind::quadratic: {
        const std::size_t d = spec.dim.value_or(4);
        LoadedProblem lp{make_quadratic_family(spec.n, d, spec.mu, spec.L, spec.data_seed),
                         {}, {}, "quadratic", false};
        lp.ref = cached_reference(lp.problem, cache, &lp.cache_hit);
        lp.x0 = random_point_at_distance(lp.ref.x_star, 1.0, spec.data_seed);
        return lp;
      }
      case SyntheticKind::sparse: {
        Dataset ds = make_sparse_classification(spec.n, spec.dim.value_or(2000), spec.nnz,
                                                spec.data_seed);
        if (spec.scale_maxabs) ds = ds.maxabs_scaled();
        data = std::make_shared<const Dataset>(subsample(ds, spec.subsample, spec.data_seed));
        tag = "sparse";
        break;
      }
      case SyntheticKind::onehot: {
        Dataset ds = make_categorical_onehot(spec.n, spec.data_seed);
        data = std::make_shared<const Dataset>(subsample(ds, spec.subsample, spec.data_seed));
        tag = "onehot";
        break;
      }
    }
  }
  if (spec.subsample < 1.0) tag += percent_tag(spec.subsample);
  LoadedProblem lp{FiniteSumProblem::glm(spec.loss, std::move(data), spec.lambda),
                   {}, {}, tag, false};
  lp.ref = cached_reference(lp.problem, cache, &lp.cache_hit);
  lp.x0 = DenseVec(lp.problem.dim());
  return lp;
}

void validate(const SuiteConfig& cfg) {
  if (cfg.methods.empty()) throw Error("no method given");
  if (cfg.seeds.empty()) throw Error("no seed given");
  if (cfg.gamma.has_value() == cfg.gamma_grid.has_value()) {
    throw Error("give exactly one of --gamma and --gamma-grid");
  }
  if (cfg.epochs < 1) throw Error("--epochs must be >= 1");
  const ProblemSpec& ps = cfg.problem;
  if (ps.data_path.has_value() == (ps.synthetic != SyntheticKind::none)) {
    throw Error("give exactly one of --data and --synthetic");
  }
  if (!(ps.subsample > 0.0 && ps.subsample <= 1.0)) {
    throw Error("--subsample must be in (0, 1]");
  }
  const bool quadratic = ps.synthetic == SyntheticKind::quadratic;
  for (MethodKind m : cfg.methods) {
    if (cfg.jit && !supports_jit(m)) {
      if (update_rule(m) == UpdateRule::finito) {
        throw Error("--jit is not available for " + std::string(to_string(m)) +
                    ": Finito-type methods have no lagged update and are not "
                    "recommended when gradients are sparse");
      }
      throw Error("--jit is not available for " + std::string(to_string(m)));
    }
    if (cfg.path == GradientPath::composite && !supports_jit(m)) {
      throw Error("--path composite is not available for " + std::string(to_string(m)));
    }
  }
  if (cfg.jit && quadratic) throw Error("--jit needs a logistic or ridge problem");
  if (cfg.jit && cfg.diagnostics) throw Error("--diagnostics needs the dense path (drop --jit)");
  if (cfg.jit && cfg.path == GradientPath::literal) {
    throw Error("--jit needs the composite path");
  }
  if (cfg.path == GradientPath::composite && quadratic) {
    throw Error("--path composite needs a logistic or ridge problem");
  }
}

SuiteResult run_suite(const SuiteConfig& cfg, std::ostream& log) {
  validate(cfg);
  std::filesystem::create_directories(cfg.out_dir);
  const LoadedProblem lp = load_problem(cfg.problem, cfg.cache);
  const FiniteSumProblem& p = lp.problem;
  SuiteResult result;
  result.cache_hit = lp.cache_hit;
  log << "problem " << lp.tag << ": n=" << p.n() << " d=" << p.dim()
      << " L=" << p.raw_L() << " mu=" << p.raw_mu() << '\n';
  log << (lp.cache_hit ? "reference: cache hit, skipped solve\n"
                       : "reference: solved, |grad f| = ")
      ;
  if (!lp.cache_hit) log << lp.ref.grad_norm << '\n';

  std::vector<double> gammas;
  if (cfg.gamma_grid) gammas = parse_gamma_grid(*cfg.gamma_grid, p.raw_L());

  for (MethodKind method : cfg.methods) {
    RunOptions base;
    base.solver.method = method;
    base.solver.scheduler = cfg.scheduler;
    base.solver.jit = cfg.jit;
    base.solver.path = resolve_path(cfg, p, method);
    base.epochs = cfg.epochs;
    base.diagnostics = cfg.diagnostics;

    for (std::uint64_t seed : cfg.seeds) {
      base.solver.seed = seed;
      SummaryRow row;
      row.dataset = lp.tag;
      row.method = std::string(to_string(method));
      row.seed = seed;
      RunResult res;
      if (cfg.gamma_grid) {
        GridResult gr = evaluate_grid(p, lp.x0, lp.ref, base, gammas, cfg.threads);
        const auto grid_file = trace_path(cfg, lp.tag, method, seed, "_grid");
        {
          auto out = open_out(grid_file);
          out.precision(17);
          out << "gamma,final_suboptimality,status,epochs_completed\n";
          for (const auto& cell : gr.cells) {
            const std::size_t done =
                cell.result.trace.empty() ? 0 : cell.result.trace.back().epoch;
            out << cell.gamma << ','
                << cell.final_suboptimality
                << ',' << cell.status << ',' << done << '\n';
            if (cell.status != "ok") {
              log << row.method << " gamma=" << cell.gamma << ": " << cell.status << '\n';
            }
          }
        }
        result.files.push_back(grid_file);
        if (gr.any_ok) {
          res = std::move(gr.cells[gr.best_index].result);
          row.gamma = gr.best_gamma;
          log << row.method << " seed=" << seed << ": best gamma " << gr.best_gamma << '\n';
        } else {
          // Nothing converged: report the smallest stepsize that ran.
          auto it = std::find_if(gr.cells.rbegin(), gr.cells.rend(),
                                 [](const GridCell& c) { return c.status == "diverged"; });
          if (it == gr.cells.rend()) {
            throw Error("no stepsize in the grid is valid for " + row.method);
          }
          res = std::move(it->result);
          row.gamma = it->gamma;
          log << row.method << " seed=" << seed << ": every stepsize diverged\n";
        }
      } else {
        RunOptions ro = base;
        ro.solver.gamma = *cfg.gamma;
        res = run(p, lp.x0, ro, lp.ref);
        row.gamma = *cfg.gamma;
      }
      row.status = res.diverged ? "diverged" : "ok";
      row.final_epoch = res.trace.back().epoch;
      row.final_suboptimality = res.trace.back().suboptimality;
      const auto file = trace_path(cfg, lp.tag, method, seed);
      {
        auto out = open_out(file);
        write_trace_csv(out, res.trace, cfg.wall_clock);
      }
      result.files.push_back(file);
      result.summary.push_back(row);
    }
  }
  const auto summary_file = cfg.out_dir / "summary.csv";
  {
    auto out = open_out(summary_file);
    write_summary_csv(out, result.summary);
  }
  result.files.push_back(summary_file);
  return result;
}

}  // namespace csaga::bench
