#include <doctest.h>

#include <cmath>
#include <set>

#include "biphoton/tomography.hpp"

using namespace biphoton;

TEST_CASE("projection set") {
  const auto set = projection_set();
  CHECK(set.size() == 16);

  std::set<std::string> labels;
  for (const auto& p : set) labels.insert(p.label());
  CHECK(labels.size() == 16);
  CHECK(labels.count("HH") == 1);
  CHECK(labels.count("LL") == 1);
  CHECK(set.front().label() == "HH");
  CHECK(set.back().label() == "LL");
}

TEST_CASE("born probabilities for the Bell state") {
  const TwoQubitState bell = effective_rho(1.0, 0.0);
  auto p = [&](const char* label) {
    return born_probability(bell,
                            {analyzer_from_letter(label[0]), analyzer_from_letter(label[1])});
  };
  CHECK(p("HH") == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p("HV") == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(p("DD") == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p("LL") == doctest::Approx(0.0).epsilon(1e-14));  // <LL|Phi+> = 0

  // the H/V basis block partitions unity for any state
  const TwoQubitState rho = mixed_model_rho(0.37);
  double total = 0.0;
  for (const char* l : {"HH", "HV", "VH", "VV"})
    total += born_probability(rho, {analyzer_from_letter(l[0]), analyzer_from_letter(l[1])});
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("simulate_counts determinism and statistics") {
  const TwoQubitState bell = effective_rho(1.0, 0.0);

  // zero-mean setting stays at zero without background
  const CountRecord r0 = simulate_counts(bell, 4500.0, 0.0, 10.0, 99);
  CHECK(r0.entries[1].counts == 0);  // HV

  // same seed, same record
  const CountRecord a = simulate_counts(bell, 4500.0, 9.0, 10.0, 1234);
  const CountRecord b = simulate_counts(bell, 4500.0, 9.0, 10.0, 1234);
  for (int i = 0; i < 16; ++i) CHECK(a.entries[i].counts == b.entries[i].counts);
  const CountRecord c = simulate_counts(bell, 4500.0, 9.0, 10.0, 1235);
  bool any_diff = false;
  for (int i = 0; i < 16; ++i) any_diff |= (a.entries[i].counts != c.entries[i].counts);
  CHECK(any_diff);

  // sample mean of the HH setting over 1000 seeds: 2250 within 3%
  double total = 0.0;
  for (int seed = 0; seed < 1000; ++seed)
    total += double(simulate_counts(bell, 4500.0, 0.0, 10.0, seed).entries[0].counts);
  CHECK(total / 1000.0 == doctest::Approx(2250.0).epsilon(0.03));

  CHECK_THROWS_AS(simulate_counts(bell, 0.0, 0.0, 10.0, 1), InvalidInputError);
}

TEST_CASE("poisson sampler moments at large mean") {
  Rng rng(7);
  const double mean = 4500.0;
  const int n = 4000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double k = double(rng.poisson(mean));
    sum += k;
    sum2 += k * k;
  }
  const double m = sum / n;
  const double var = sum2 / n - m * m;
  CHECK(m == doctest::Approx(mean).epsilon(0.01));
  CHECK(var == doctest::Approx(mean).epsilon(0.10));
}

TEST_CASE("linear inversion recovers the state from exact frequencies") {
  for (double v : {0.0, 0.4, 0.95}) {
    const TwoQubitState rho = mixed_model_rho(v);
    CountRecord record;
    record.background_rate_cps = 0.0;
    const double scale = 1e7;  // large scale to make rounding negligible
    for (const auto& pair : projection_set())
      record.entries.push_back({pair, std::llround(scale * born_probability(rho, pair)), 1.0});
    const Matrix4c est = detail::linear_inversion(record);
    CHECK((est - rho.matrix()).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("mle reconstruction, noiseless") {
  // exact expected counts -> concurrence recovered within 0.01
  for (double v : {0.0, 0.5, 0.95}) {
    const TwoQubitState truth = mixed_model_rho(v);
    const CountRecord record = expected_counts(truth, 9000.0, 9.0, 10.0);
    const MleResult result = mle_reconstruct(record);
    CHECK(result.converged);
    const double c = concurrence(result.state());
    CHECK(std::abs(c - v) < 0.01);
  }

  // pure Bell state: fidelity >= 0.999
  const CountRecord record = expected_counts(effective_rho(1.0, 0.0), 9000.0, 0.0, 10.0);
  const MleResult result = mle_reconstruct(record);
  CHECK(fidelity(result.state(), phi_plus_ket()) >= 0.999);
}

TEST_CASE("mle likelihood trace is non-decreasing and the state is physical") {
  const TwoQubitState truth = mixed_model_rho(0.6);
  const CountRecord record = simulate_counts(truth, 9000.0, 9.0, 10.0, 4242);
  const MleResult result = mle_reconstruct(record);
  for (std::size_t i = 1; i < result.likelihood_trace.size(); ++i)
    CHECK(result.likelihood_trace[i] >= result.likelihood_trace[i - 1] - 1e-9);
  CHECK_NOTHROW(result.state());  // Hermitian, unit trace, PSD

  // garbage counts still give a physical state
  CountRecord garbage;
  garbage.background_rate_cps = 0.0;
  long long fake = 1;
  for (const auto& pair : projection_set()) {
    garbage.entries.push_back({pair, fake % 97, 1.0});
    fake = (fake * 31 + 7) % 1000003;
  }
  CHECK_NOTHROW(mle_reconstruct(garbage).state());
}

TEST_CASE("mle under Poisson noise stays near the truth") {
  const double v = 0.5;
  const TwoQubitState truth = mixed_model_rho(v);
  double mean_c = 0.0;
  const int n_seeds = 20;
  for (int seed = 0; seed < n_seeds; ++seed) {
    const CountRecord record = simulate_counts(truth, 9000.0, 9.0, 10.0, 100 + seed);
    mean_c += concurrence(mle_reconstruct(record).state()) / n_seeds;
  }
  CHECK(std::abs(mean_c - v) < 0.05);
}

TEST_CASE("count record validation") {
  CountRecord record;
  CHECK_THROWS_AS(record.validate(), InvalidInputError);
  for (const auto& pair : projection_set()) record.entries.push_back({pair, 1, 1.0});
  CHECK_NOTHROW(record.validate());
  record.entries[3].counts = -1;
  CHECK_THROWS_AS(record.validate(), InvalidInputError);
  std::swap(record.entries[0], record.entries[1]);
  CHECK_THROWS_AS(record.validate(), InvalidInputError);
}
