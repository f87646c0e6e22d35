#include "avatar/sampling.hpp"

#include <algorithm>
#include <thread>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "avatar/error.hpp"

namespace avatar {
namespace {

VariantSet unobserved(const VariantSet& v_hat_s, const UniqueVariantLog& lplus) {
  VariantSet out;
  for (const auto& v : v_hat_s) {
    if (!lplus.contains(v)) out.insert(v);
  }
  return out;
}

}  // namespace

nlohmann::json SampleResult::to_json() const {
  return {{"v_hat_s_count", v_hat_s.size()},
          {"v_hat_u_count", v_hat_u.size()},
          {"draw_count", draw_count},
          {"chains", chains},
          {"acceptance_rate", acceptance_rate},
          {"truncated", truncated}};
}

SampleResult naive_sample(const GeneratorFn& gen, const UniqueVariantLog& lplus, const NaiveOptions& options,
                          Rng& rng) {
  if (options.k == 0) throw InvalidInput("naive_sample: k must be >= 1");
  SampleResult r;
  for (std::size_t i = 0; i < options.k; ++i) r.v_hat_s.insert(gen(rng));
  if (options.union_observed) r.v_hat_s.insert(lplus.begin(), lplus.end());
  r.draw_count = options.k;
  r.v_hat_u = unobserved(r.v_hat_s, lplus);
  return r;
}

double mh_acceptance(double p_current, double p_proposal) {
  auto check = [](double p) {
    if (!(p > 0.0 && p < 1.0)) {
      throw InvalidInput("mh_acceptance: discriminator output must lie in (0,1), got " + std::to_string(p));
    }
  };
  check(p_current);
  check(p_proposal);
  return std::min(1.0, (1.0 / p_current - 1.0) / (1.0 / p_proposal - 1.0));
}

ChainResult run_mh_chain(const GeneratorFn& gen, const ScorerFn& d_p, const Variant& init, std::size_t kappa,
                         bool strict_pseudocode, Rng& rng) {
  ChainResult r;
  Variant x = init;
  double px = d_p(x);
  Variant y = gen(rng);
  r.draws = 1;
  for (std::size_t step = 0; step < kappa; ++step) {
    const double py = d_p(y);
    if (mh_acceptance(px, py) > rng.uniform()) {
      x = y;
      px = py;
      ++r.accepted;
    }
    if (step + 1 < kappa || strict_pseudocode) {
      y = gen(rng);
      ++r.draws;
    }
  }
  r.output = strict_pseudocode ? std::move(y) : std::move(x);
  return r;
}

SampleResult mh_sample(const GeneratorFn& gen, const ScorerFn& d_p, const UniqueVariantLog& lplus,
                       const UniqueVariantLog& lplus_e, const MhOptions& options, const Rng& rng) {
  if (lplus_e.empty()) throw InvalidInput("mh_sample: initialization set is empty");
  if (options.kappa == 0) throw InvalidInput("mh_sample: kappa must be >= 1");
  if (options.patience == 0) throw InvalidInput("mh_sample: patience must be >= 1");

  struct Outcome {
    Variant init;
    ChainResult chain;
  };
  const std::size_t jobs = std::max<std::size_t>(1, options.jobs);
  // Block size is fixed so the set of chains evaluated never depends on jobs.
  constexpr std::size_t kBlock = 64;

  // Scores are memoized per worker; the scorer is deterministic, so caching
  // does not affect results.
  std::vector<std::unordered_map<Variant, double, VariantHash>> caches(jobs);
  auto run_chain = [&](std::size_t index, std::size_t worker) {
    auto& cache = caches[worker];
    ScorerFn cached = [&](const Variant& v) {
      auto it = cache.find(v);
      if (it != cache.end()) return it->second;
      const double p = d_p(v);
      cache.emplace(v, p);
      return p;
    };
    Rng chain_rng = rng.substream(index);
    Outcome o;
    o.init = lplus_e[static_cast<std::size_t>(chain_rng.below(lplus_e.size()))];
    o.chain = run_mh_chain(gen, cached, o.init, options.kappa, options.strict_pseudocode, chain_rng);
    return o;
  };

  SampleResult r;
  std::size_t cnt = 0;
  std::size_t accepted = 0;
  std::size_t steps = 0;
  std::vector<Outcome> block(kBlock);
  std::size_t next = 0;
  bool done = false;
  while (!done) {
    const std::size_t count = std::min(kBlock, options.max_chains - next);
    if (jobs == 1) {
      for (std::size_t i = 0; i < count; ++i) block[i] = run_chain(next + i, 0);
    } else {
      std::vector<std::thread> workers;
      std::vector<std::exception_ptr> errors(jobs);
      for (std::size_t w = 0; w < jobs; ++w) {
        workers.emplace_back([&, w] {
          try {
            for (std::size_t i = w; i < count; i += jobs) block[i] = run_chain(next + i, w);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
      for (auto& t : workers) t.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
    for (std::size_t i = 0; i < count && !done; ++i) {
      const Outcome& o = block[i];
      ++r.chains;
      r.draw_count += o.chain.draws;
      accepted += o.chain.accepted;
      steps += options.kappa;
      if (o.chain.output != o.init && r.v_hat_s.insert(o.chain.output).second) {
        cnt = 0;
      } else if (++cnt >= options.patience) {
        done = true;
      }
    }
    next += count;
    if (!done && next >= options.max_chains) {
      r.truncated = true;
      done = true;
    }
  }
  r.acceptance_rate = steps == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(steps);
  r.v_hat_u = unobserved(r.v_hat_s, lplus);
  return r;
}

}  // namespace avatar
