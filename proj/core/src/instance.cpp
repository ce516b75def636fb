#include "hqp/instance.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace hqp {

namespace {

using nlohmann::json;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
}

}  // namespace

void InstanceParams::validate() const {
  if (n < 1) throw std::invalid_argument("InstanceParams: n must be >= 1");
  if (d != pi.dim()) throw std::invalid_argument("InstanceParams: d does not match pi");
  if (m < 1) throw std::invalid_argument("InstanceParams: m must be >= 1");
  check_alpha(alpha);
  (void)planted_counts(n, pi);
}

std::vector<std::int64_t> planted_counts(int n, const ProportionVector& pi) {
  std::vector<std::int64_t> counts;
  counts.reserve(static_cast<std::size_t>(pi.dim()));
  for (double p : pi.values()) {
    const double scaled = n * p;
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) > 1e-9)
      throw std::invalid_argument("n * pi is not integral (n=" + std::to_string(n) + ")");
    counts.push_back(static_cast<std::int64_t>(rounded));
  }
  if (std::accumulate(counts.begin(), counts.end(), std::int64_t{0}) != n)
    throw std::invalid_argument("n * pi does not sum to n");
  return counts;
}

Assignment sample_planted_assignment(int n, const ProportionVector& pi, Rng& rng) {
  const auto counts = planted_counts(n, pi);
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (int r = 0; r < pi.dim(); ++r) labels.insert(labels.end(), static_cast<std::size_t>(counts[r]), r);
  shuffle(std::span<int>(labels), rng);
  return Assignment(std::move(labels), pi.dim());
}

Pool sample_pool(int n, double alpha, Rng& rng) {
  check_alpha(alpha);
  Pool pool(static_cast<std::size_t>(n));
  for (auto& bit : pool) bit = bernoulli(rng, alpha) ? 1 : 0;
  return pool;
}

Histogram histogram_of(const Assignment& tau, const Pool& pool) {
  if (pool.size() != static_cast<std::size_t>(tau.size()))
    throw std::invalid_argument("histogram_of: pool length differs from assignment length");
  Histogram h(static_cast<std::size_t>(tau.num_types()), 0);
  for (int i = 0; i < tau.size(); ++i)
    if (pool[static_cast<std::size_t>(i)]) ++h[static_cast<std::size_t>(tau[i])];
  return h;
}

int query_count_for_gamma(int n, double gamma) {
  if (n < 2) throw std::invalid_argument("query_count_for_gamma: n must be >= 2");
  if (!(gamma > 0.0)) throw std::invalid_argument("query_count_for_gamma: gamma must be > 0");
  const double m = std::round(gamma * n / std::log(static_cast<double>(n)));
  return std::max(1, static_cast<int>(m));
}

Instance make_instance(InstanceParams params, Assignment tau_star, std::vector<Pool> pools) {
  params.m = static_cast<int>(pools.size());
  if (tau_star.size() != params.n) throw std::invalid_argument("make_instance: tau_star length differs from n");
  if (tau_star.num_types() != params.d) throw std::invalid_argument("make_instance: tau_star type count differs from d");
  std::vector<Histogram> hist;
  hist.reserve(pools.size());
  for (const auto& pool : pools) hist.push_back(histogram_of(tau_star, pool));
  return Instance{std::move(params), std::move(tau_star), std::move(pools), std::move(hist)};
}

Instance generate_instance(const InstanceParams& params, std::uint64_t stream) {
  params.validate();
  Rng rng = make_stream(params.seed, stream);
  Assignment tau = sample_planted_assignment(params.n, params.pi, rng);
  std::vector<Pool> pools;
  pools.reserve(static_cast<std::size_t>(params.m));
  for (int a = 0; a < params.m; ++a) pools.push_back(sample_pool(params.n, params.alpha, rng));
  return make_instance(params, std::move(tau), std::move(pools));
}

Instance generate_instance(const InstanceParams& params, const Assignment& tau_star, std::uint64_t stream) {
  params.validate();
  Rng rng = make_stream(params.seed, stream);
  std::vector<Pool> pools;
  pools.reserve(static_cast<std::size_t>(params.m));
  for (int a = 0; a < params.m; ++a) pools.push_back(sample_pool(params.n, params.alpha, rng));
  return make_instance(params, tau_star, std::move(pools));
}

std::string instance_to_json(const Instance& inst) {
  const auto& p = inst.params;
  json params = {
      {"n", p.n},
      {"d", p.d},
      {"pi", std::vector<double>(p.pi.values().begin(), p.pi.values().end())},
      {"alpha", p.alpha},
      {"m", p.m},
      {"seed", p.seed},
  };
  std::vector<int> tau;
  tau.reserve(static_cast<std::size_t>(inst.n()));
  for (int t : inst.tau_star.labels()) tau.push_back(t + 1);
  json pools = json::array();
  for (const auto& pool : inst.pools) {
    json row = json::array();
    for (auto bit : pool) row.push_back(static_cast<int>(bit));
    pools.push_back(std::move(row));
  }
  json doc = {{"params", params}, {"tau_star", tau}, {"pools", pools}, {"histograms", inst.histograms}};
  return doc.dump(2);
}

Instance instance_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("instance JSON: ") + e.what());
  }
  try {
    const auto& jp = doc.at("params");
    InstanceParams params;
    params.n = jp.at("n").get<int>();
    params.d = jp.at("d").get<int>();
    params.pi = ProportionVector(jp.at("pi").get<std::vector<double>>());
    params.alpha = jp.at("alpha").get<double>();
    params.m = jp.at("m").get<int>();
    params.seed = jp.at("seed").get<std::uint64_t>();
    params.validate();

    std::vector<int> labels = doc.at("tau_star").get<std::vector<int>>();
    for (int& t : labels) --t;
    Assignment tau(std::move(labels), params.d);

    std::vector<Pool> pools;
    for (const auto& row : doc.at("pools")) {
      Pool pool;
      for (const auto& bit : row) {
        const int b = bit.get<int>();
        if (b != 0 && b != 1) throw std::invalid_argument("instance JSON: pool bits must be 0 or 1");
        pool.push_back(static_cast<std::uint8_t>(b));
      }
      pools.push_back(std::move(pool));
    }
    if (static_cast<int>(pools.size()) != params.m)
      throw std::invalid_argument("instance JSON: pool count differs from params.m");

    Instance inst = make_instance(params, std::move(tau), std::move(pools));
    const auto stored = doc.at("histograms").get<std::vector<Histogram>>();
    if (stored != inst.histograms)
      throw std::invalid_argument("instance JSON: histograms disagree with tau_star and pools");
    return inst;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("instance JSON: ") + e.what());
  }
}

void write_instance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << instance_to_json(inst) << '\n';
}

Instance read_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str());
}

}  // namespace hqp
