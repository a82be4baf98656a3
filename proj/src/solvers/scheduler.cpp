#include <algorithm>
#include <numeric>
#include <string>

#include "csaga/error.hpp"
#include "csaga/solvers.hpp"

namespace csaga {

UpdateRule update_rule(MethodKind m) noexcept {
  switch (m) {
    case MethodKind::gd:
      return UpdateRule::full_gradient;
    case MethodKind::csaga:
    case MethodKind::saga:
    case MethodKind::rp_saga:
      return UpdateRule::saga;
    case MethodKind::sag:
    case MethodKind::iag:
      return UpdateRule::sag;
    case MethodKind::finito:
    case MethodKind::diag:
      return UpdateRule::finito;
  }
  return UpdateRule::saga;
}

SchedulerKind default_scheduler(MethodKind m) noexcept {
  switch (m) {
    case MethodKind::gd:
    case MethodKind::csaga:
    case MethodKind::iag:
    case MethodKind::diag:
      return SchedulerKind::cyclic;
    case MethodKind::rp_saga:
      return SchedulerKind::random_permutation;
    case MethodKind::saga:
    case MethodKind::sag:
    case MethodKind::finito:
      return SchedulerKind::iid_uniform;
  }
  return SchedulerKind::cyclic;
}

bool supports_jit(MethodKind m) noexcept {
  const UpdateRule r = update_rule(m);
  return r == UpdateRule::saga || r == UpdateRule::sag;
}

std::string_view to_string(MethodKind m) noexcept {
  switch (m) {
    case MethodKind::gd:
      return "gd";
    case MethodKind::csaga:
      return "csaga";
    case MethodKind::saga:
      return "saga";
    case MethodKind::rp_saga:
      return "rpsaga";
    case MethodKind::sag:
      return "sag";
    case MethodKind::iag:
      return "iag";
    case MethodKind::finito:
      return "finito";
    case MethodKind::diag:
      return "diag";
  }
  return "?";
}

std::string_view to_string(SchedulerKind s) noexcept {
  switch (s) {
    case SchedulerKind::cyclic:
      return "cyclic";
    case SchedulerKind::iid_uniform:
      return "iid";
    case SchedulerKind::random_permutation:
      return "permutation";
  }
  return "?";
}

MethodKind parse_method(std::string_view name) {
  for (auto m : {MethodKind::gd, MethodKind::csaga, MethodKind::saga,
                 MethodKind::rp_saga, MethodKind::sag, MethodKind::iag,
                 MethodKind::finito, MethodKind::diag}) {
    if (name == to_string(m)) return m;
  }
  if (name == "rp_saga") return MethodKind::rp_saga;
  throw Error("unknown method '" + std::string(name) + "'");
}

SchedulerKind parse_scheduler(std::string_view name) {
  if (name == "cyclic") return SchedulerKind::cyclic;
  if (name == "iid" || name == "iid_uniform") return SchedulerKind::iid_uniform;
  if (name == "permutation" || name == "random_permutation") {
    return SchedulerKind::random_permutation;
  }
  throw Error("unknown scheduler '" + std::string(name) + "'");
}

Scheduler::Scheduler(SchedulerKind kind, std::size_t n, std::uint64_t seed)
    : kind_(kind), n_(n), rng_(derive_seed(seed, Stream::scheduler)) {
  if (n_ == 0) throw Error("scheduler: n must be positive");
  if (kind_ == SchedulerKind::random_permutation) {
    perm_.resize(n_);
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  }
}

std::size_t Scheduler::next() {
  const std::size_t pos = static_cast<std::size_t>(emitted_ % n_);
  ++emitted_;
  switch (kind_) {
    case SchedulerKind::cyclic:
      return pos;
    case SchedulerKind::iid_uniform: {
      std::uniform_int_distribution<std::size_t> pick(0, n_ - 1);
      return pick(rng_);
    }
    case SchedulerKind::random_permutation:
      if (pos == 0) std::shuffle(perm_.begin(), perm_.end(), rng_);
      return perm_[pos];
  }
  return pos;
}

HistoryWindow::HistoryWindow(std::size_t n) : ring_(n + 1) {}

void HistoryWindow::fill(const DenseVec& x) {
  for (auto& slot : ring_) slot = x;
  head_ = 0;
  count_ = ring_.size();
}

void HistoryWindow::push(const DenseVec& x) {
  head_ = (head_ + 1) % ring_.size();
  ring_[head_] = x;
  count_ = std::min(count_ + 1, ring_.size());
}

const DenseVec& HistoryWindow::back(std::size_t j) const {
  if (j >= count_) {
    throw Error("history window: x^{k-" + std::to_string(j) + "} not recorded");
  }
  return ring_[(head_ + ring_.size() - j) % ring_.size()];
}

}  // namespace csaga
