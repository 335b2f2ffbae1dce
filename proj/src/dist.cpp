#include "hh/dist.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hh {

namespace {

constexpr double kMassTolerance = 1e-9;
constexpr double kSeparation = 1e-12;

Distribution finalize(std::vector<double> probs) {
  if (probs.empty()) throw std::invalid_argument("distribution: k must be >= 1");
  double total = 0;
  for (double p : probs) {
    if (!(p >= 0.0) || p > 1.0) {
      throw std::invalid_argument("distribution: probabilities must lie in [0,1]");
    }
    total += p;
  }
  if (std::fabs(total - 1.0) > kMassTolerance) {
    throw std::invalid_argument("distribution: probabilities must sum to 1");
  }
  Distribution d;
  d.probs = std::move(probs);
  d.cdf.resize(d.probs.size());
  double acc = 0;
  for (size_t i = 0; i < d.probs.size(); ++i) {
    acc += d.probs[i];
    d.cdf[i] = acc;
  }
  d.cdf.back() = total;
  return d;
}

}  // namespace

Distribution make_explicit(std::vector<double> probs) { return finalize(std::move(probs)); }

Distribution make_zipf(int k, double beta) {
  if (k < 1) throw std::invalid_argument("zipf: k must be >= 1");
  if (beta < 0) throw std::invalid_argument("zipf: beta must be >= 0");
  std::vector<double> probs(k);
  double sum = 0;
  for (int i = 1; i <= k; ++i) {
    probs[i - 1] = std::pow(static_cast<double>(i), -beta);
    sum += probs[i - 1];
  }
  for (double& p : probs) p /= sum;
  return finalize(std::move(probs));
}

Distribution make_setting_a(double p3) {
  if (p3 < 0.13 || p3 > 0.19) {
    throw std::invalid_argument("setting-a: p3 must lie in [0.13, 0.19]");
  }
  constexpr int k = 30;
  const double p1 = 0.35, p2 = 0.28;
  const double tail = (1.0 - p1 - p2 - p3) / (k - 3);
  std::vector<double> probs(k, tail);
  probs[0] = p1;
  probs[1] = p2;
  probs[2] = p3;
  return finalize(std::move(probs));
}

Problem make_problem(Distribution dist, double gamma, double delta) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("problem.gamma: must lie in (0,1)");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("problem.delta: must lie in (0,1)");
  }
  for (size_t i = 0; i < dist.probs.size(); ++i) {
    if (std::fabs(dist.probs[i] - gamma) < kSeparation) {
      std::ostringstream msg;
      msg << "problem.gamma: p_" << (i + 1) << " = " << dist.probs[i]
          << " coincides with gamma; strict separation required";
      throw std::invalid_argument(msg.str());
    }
  }
  return Problem{std::move(dist), gamma, delta};
}

std::vector<int> ground_truth(const Problem& problem) {
  std::vector<int> out;
  for (int i = 0; i < problem.dist.k(); ++i) {
    if (problem.dist.probs[i] > problem.gamma) out.push_back(i + 1);
  }
  return out;
}

int sample(const Distribution& dist, Rng& rng) {
  const double u = rng.u01() * dist.cdf.back();
  auto it = std::upper_bound(dist.cdf.begin(), dist.cdf.end(), u);
  if (it == dist.cdf.end()) --it;
  return static_cast<int>(it - dist.cdf.begin()) + 1;
}

Distribution parse_distribution_spec(const std::string& spec) {
  const auto bad = [&](const std::string& why) {
    return std::invalid_argument("dist spec '" + spec + "': " + why);
  };
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw bad("expected '<kind>:<args>'");
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  try {
    if (kind == "explicit") {
      std::vector<double> probs;
      std::stringstream ss(rest);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        size_t used = 0;
        probs.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw bad("bad probability '" + tok + "'");
      }
      if (probs.empty()) throw bad("no probabilities given");
      return make_explicit(std::move(probs));
    }
    if (kind == "zipf") {
      const auto sep = rest.find(':');
      if (sep == std::string::npos) throw bad("expected zipf:<beta>:<k>");
      const double beta = std::stod(rest.substr(0, sep));
      const int k = std::stoi(rest.substr(sep + 1));
      return make_zipf(k, beta);
    }
    if (kind == "setting-a") {
      return make_setting_a(std::stod(rest));
    }
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception&) {
    throw bad("malformed number");
  }
  throw bad("unknown kind '" + kind + "'");
}

}  // namespace hh
