#include <openssl/evp.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>

#include "csaga/bench.hpp"
#include "csaga/error.hpp"

namespace csaga::bench {

namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw Error("sha256: digest init failed");
    }
  }

  void update(const void* data, std::size_t len) {
    EVP_DigestUpdate(ctx_.get(), data, len);
  }
  template <typename T>
  void update_value(const T& v) {
    update(&v, sizeof(T));
  }

  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), md, &len);
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(kDigits[md[i] >> 4]);
      out.push_back(kDigits[md[i] & 0xF]);
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

std::string hexfloat(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

constexpr const char* kMagic = "csaga-reference v1";

std::optional<ReferenceSolution> read_cache(const std::filesystem::path& path,
                                            std::size_t dim) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line;
  if (!std::getline(in, line) || line != kMagic) return std::nullopt;
  ReferenceSolution ref;
  std::string key, value;
  std::size_t d = 0;
  auto read_kv = [&](const char* expect) {
    return static_cast<bool>(in >> key >> value) && key == expect;
  };
  if (!read_kv("f_star")) return std::nullopt;
  ref.f_star = std::strtod(value.c_str(), nullptr);
  if (!read_kv("grad_norm")) return std::nullopt;
  ref.grad_norm = std::strtod(value.c_str(), nullptr);
  if (!read_kv("dim")) return std::nullopt;
  d = std::strtoull(value.c_str(), nullptr, 10);
  if (d != dim) return std::nullopt;
  ref.x_star = DenseVec(d);
  for (std::size_t j = 0; j < d; ++j) {
    if (!(in >> value)) return std::nullopt;
    ref.x_star[j] = std::strtod(value.c_str(), nullptr);
  }
  return ref;
}

void write_cache(const std::filesystem::path& path, const ReferenceSolution& ref) {
  std::filesystem::create_directories(path.parent_path());
  std::random_device rd;
  const auto tmp = path.parent_path() /
                   (path.filename().string() + ".tmp" + std::to_string(rd()));
  {
    std::ofstream out(tmp);
    if (!out) throw Error("cannot write reference cache '" + tmp.string() + "'");
    out << kMagic << '\n'
        << "f_star " << hexfloat(ref.f_star) << '\n'
        << "grad_norm " << hexfloat(ref.grad_norm) << '\n'
        << "dim " << ref.x_star.size() << '\n';
    for (double v : ref.x_star) out << hexfloat(v) << '\n';
    if (!out) throw Error("failed writing reference cache '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("CSAGA_CACHE_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return ".csaga_cache";
}

std::string problem_hash(const FiniteSumProblem& p, double tol) {
  Sha256 h;
  const std::string kind(to_string(p.loss()));
  h.update(kind.data(), kind.size());
  h.update_value(p.lambda());
  h.update_value(tol);
  h.update_value(static_cast<std::uint64_t>(p.n()));
  h.update_value(static_cast<std::uint64_t>(p.dim()));
  if (p.is_glm()) {
    for (const auto& s : p.dataset().samples()) {
      h.update_value(s.label);
      h.update_value(static_cast<std::uint64_t>(s.features.nnz()));
      h.update(s.features.indices().data(), s.features.nnz() * sizeof(std::uint32_t));
      h.update(s.features.values().data(), s.features.nnz() * sizeof(double));
    }
  } else {
    for (std::size_t i = 0; i < p.n(); ++i) {
      const auto& c = p.component(i);
      h.update(c.hessian.data(), c.hessian.size() * sizeof(double));
      h.update(c.linear.data(), c.linear.size() * sizeof(double));
      h.update_value(c.offset);
    }
  }
  return h.hex();
}

ReferenceSolution cached_reference(const FiniteSumProblem& p,
                                   const CacheOptions& cache, bool* hit) {
  if (hit != nullptr) *hit = false;
  if (cache.dir.empty()) return solve_reference(p, cache.tol);
  const auto path = cache.dir / (problem_hash(p, cache.tol) + ".ref");
  if (auto ref = read_cache(path, p.dim())) {
    if (hit != nullptr) *hit = true;
    return *ref;
  }
  ReferenceSolution ref = solve_reference(p, cache.tol);
  try {
    write_cache(path, ref);
  } catch (const std::filesystem::filesystem_error& e) {
    throw Error(std::string("reference cache: ") + e.what());
  }
  return ref;
}

}  // namespace csaga::bench
