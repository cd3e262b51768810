#include "spikeslab/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "spikeslab/error.hpp"

namespace spikeslab::cli {

namespace {

// Reads declared keys out of a JSON object and rejects the rest.
class Reader {
 public:
  explicit Reader(const Json& j) : j_(j) {
    if (!j.is_object()) throw InvalidArgument("config: expected a JSON object");
  }

  template <typename T>
  void operator()(const char* key, T& field) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    try {
      if constexpr (std::is_floating_point_v<T>) {
        if (!it->is_number()) throw InvalidArgument("expected a number");
      } else if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_integer()) throw InvalidArgument("expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (it->is_number_integer() && !it->is_number_unsigned()) {
            throw InvalidArgument("expected a non-negative integer");
          }
        }
      }
      field = it->template get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument(std::string("config key '") + key + "': " + e.what());
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(std::string("config key '") + key + "': " + e.what());
    }
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) throw InvalidArgument("config: unknown key '" + key + "'");
    }
  }

 private:
  const Json& j_;
  std::set<std::string> seen_;
};

template <typename Config, typename Visit>
Config read_config(const Json& j, Visit visit) {
  Config c;
  Reader r(j);
  visit(r, c);
  r.finish();
  return c;
}

// Writes the same fields visit() reads, so to_json and the readers agree.
class Writer {
 public:
  template <typename T>
  void operator()(const char* key, const T& field) {
    j_[key] = field;
  }
  Json take() { return std::move(j_); }

 private:
  Json j_ = Json::object();
};

template <typename R, typename C>
void visit_gls(R& r, C& c) {
  r("p_dim", c.p_dim);
  r("p0", c.p0);
  r("sigma_1_2", c.sigma_1_2);
  r("sigma_e2_grid", c.sigma_e2_grid);
  r("wishart_df", c.wishart_df);
  r("replicates", c.replicates);
  r("seed", c.seed);
  r("naive_sigma0_grid", c.naive_sigma0_grid);
  r("sweeps", c.sweeps);
  r("tol", c.tol);
}

template <typename R, typename C>
void visit_ppca(R& r, C& c) {
  r("n", c.n);
  r("p", c.p);
  r("cluster_sizes", c.cluster_sizes);
  r("informative_dims", c.informative_dims);
  r("k_fit", c.k_fit);
  r("sigma_1_2", c.sigma_1_2);
  r("sigma_e2", c.sigma_e2);
  r("p0", c.p0);
  r("sigma_0_2_grid", c.sigma_0_2_grid);
  r("replicates", c.replicates);
  r("sweeps", c.sweeps);
  r("seed", c.seed);
}

template <typename R, typename C>
void visit_fit_gls(R& r, C& c) {
  r("beta_hat", c.beta_hat);
  r("corr", c.corr);
  r("sigma_e2", c.sigma_e2);
  r("sigma_1_2", c.sigma_1_2);
  r("p0", c.p0);
  r("scheme", c.scheme);
  r("sigma0", c.sigma0);
  r("init", c.init);
  r("sweeps", c.sweeps);
  r("tol", c.tol);
  r("seed", c.seed);
}

template <typename R, typename C>
void visit_fit_ppca(R& r, C& c) {
  r("data", c.data);
  r("k", c.k);
  r("sigma_e2", c.sigma_e2);
  r("sigma_1_2", c.sigma_1_2);
  r("p0", c.p0);
  r("scheme", c.scheme);
  r("sigma0", c.sigma0);
  r("sweeps", c.sweeps);
  r("seed", c.seed);
}

template <typename R, typename C>
void visit_threshold(R& r, C& c) {
  r("p0", c.p0);
  r("sigma_e2", c.sigma_e2);
  r("sigma_1_2", c.sigma_1_2);
  r("sigma0", c.sigma0);
  r("grid_start", c.grid_start);
  r("grid_stop", c.grid_stop);
  r("grid_step", c.grid_step);
  r("grid", c.grid);
  r("sweeps", c.sweeps);
  r("tol", c.tol);
  r("seed", c.seed);
}

template <typename C, typename Visit>
Json write_config(const C& c, Visit visit) {
  Writer w;
  visit(w, c);
  return w.take();
}

void check_scheme(const std::string& scheme) {
  if (scheme != "sparse" && scheme != "naive") {
    throw InvalidArgument("scheme: expected 'sparse' or 'naive', got '" + scheme + "'");
  }
}

}  // namespace

Json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config " + path.string());
  try {
    Json j = Json::parse(in, nullptr, true, true);
    if (!j.is_object()) throw InvalidArgument("config " + path.string() + ": expected an object");
    return j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("config " + path.string() + ": " + e.what());
  }
}

void merge_into(Json& base, const Json& overrides) {
  for (const auto& [key, value] : overrides.items()) base[key] = value;
}

Json preset(std::string_view command, std::string_view name) {
  if (name != "smoke" && name != "paper") {
    throw InvalidArgument("preset: expected 'smoke' or 'paper', got '" + std::string(name) + "'");
  }
  const bool smoke = name == "smoke";
  if (command == "bench-gls") {
    if (smoke) {
      return {{"p_dim", 50}, {"wishart_df", 100}, {"replicates", 3}};
    }
    return {{"p_dim", 1000}, {"wishart_df", 1000}, {"replicates", 100}};
  }
  if (command == "bench-ppca") {
    if (smoke) {
      return {{"n", 60},
              {"p", 400},
              {"cluster_sizes", {24, 24, 6, 6}},
              {"informative_dims", 20},
              {"p0", 1.0 - 20.0 / 400.0},
              {"replicates", 2},
              {"sweeps", 50}};
    }
    return {{"n", 500}, {"p", 10000}, {"replicates", 5}, {"sweeps", 250}};
  }
  if (command == "threshold-curve") {
    if (smoke) return {{"grid_step", 0.5}};
    return Json::object();
  }
  return Json::object();
}

std::vector<double> ThresholdConfig::resolved_grid() const {
  if (!grid.empty()) return grid;
  if (!(grid_step > 0.0) || !std::isfinite(grid_start) || !std::isfinite(grid_stop) ||
      grid_stop < grid_start) {
    throw InvalidArgument("grid: need finite grid_start <= grid_stop and grid_step > 0");
  }
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((grid_stop - grid_start) / grid_step + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(grid_start + static_cast<double>(i) * grid_step);
  return out;
}

Json to_json(const sim::GlsSimConfig& c) {
  return write_config(c, [](auto& w, const auto& x) { visit_gls(w, x); });
}
Json to_json(const sim::PpcaSimConfig& c) {
  return write_config(c, [](auto& w, const auto& x) { visit_ppca(w, x); });
}
Json to_json(const FitGlsConfig& c) {
  return write_config(c, [](auto& w, const auto& x) { visit_fit_gls(w, x); });
}
Json to_json(const FitPpcaConfig& c) {
  return write_config(c, [](auto& w, const auto& x) { visit_fit_ppca(w, x); });
}
Json to_json(const ThresholdConfig& c) {
  return write_config(c, [](auto& w, const auto& x) { visit_threshold(w, x); });
}

sim::GlsSimConfig gls_sim_config(const Json& j) {
  auto c = read_config<sim::GlsSimConfig>(j, [](auto& r, auto& x) { visit_gls(r, x); });
  c.validate();
  return c;
}

sim::PpcaSimConfig ppca_sim_config(const Json& j) {
  auto c = read_config<sim::PpcaSimConfig>(j, [](auto& r, auto& x) { visit_ppca(r, x); });
  c.validate();
  return c;
}

FitGlsConfig fit_gls_config(const Json& j) {
  auto c = read_config<FitGlsConfig>(j, [](auto& r, auto& x) { visit_fit_gls(r, x); });
  check_scheme(c.scheme);
  if (c.init != "spike" && c.init != "slab" && c.init != "best") {
    throw InvalidArgument("init: expected 'spike', 'slab' or 'best'");
  }
  if (c.beta_hat.empty()) throw InvalidArgument("beta_hat: path required");
  if (c.corr.empty()) throw InvalidArgument("corr: path required");
  return c;
}

FitPpcaConfig fit_ppca_config(const Json& j) {
  auto c = read_config<FitPpcaConfig>(j, [](auto& r, auto& x) { visit_fit_ppca(r, x); });
  check_scheme(c.scheme);
  if (c.data.empty()) throw InvalidArgument("data: path required");
  return c;
}

ThresholdConfig threshold_config(const Json& j) {
  return read_config<ThresholdConfig>(j, [](auto& r, auto& x) { visit_threshold(r, x); });
}

}  // namespace spikeslab::cli
