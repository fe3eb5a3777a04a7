#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "tdwsmir/error.hpp"
#include "tdwsmir/image_source.hpp"
#include "test_util.hpp"

using namespace tdw;

namespace {

const RoomSpec kRoom{{4.0, 6.0, 3.0}, {0.45, 0.7, 0.8, 0.5, 0.6, 0.75}};
const Vec3 kSource{1.0, 3.5, 2.1};
const Vec3 kCenter{2.5, 3.5, 2.1};

SimulationConfig small_config() {
  SimulationConfig c;
  c.fs = 16000.0;
  c.output_order = 3;
  c.threads = 2;
  return c;
}

double max_diff(const SHTimeSeries& a, const SHTimeSeries& b) {
  EXPECT_EQ(a.frames(), b.frames());
  EXPECT_EQ(a.start(), b.start());
  double w = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) w = std::max(w, std::abs(a.data()[i] - b.data()[i]));
  return w;
}

}  // namespace

TEST(Images, OrderZeroAndOne) {
  const auto zero = enumerate_images(kRoom, kSource, kCenter, ImageSelection::max_order(0));
  ASSERT_EQ(zero.size(), 1u);
  EXPECT_EQ(zero[0].attenuation, 1.0);
  EXPECT_EQ(zero[0].position, kSource);

  const auto first = enumerate_images(kRoom, kSource, kCenter, ImageSelection::max_order(1));
  ASSERT_EQ(first.size(), 7u);
  bool found = false;
  for (const auto& img : first) {
    if (img.counts[0] == 1 && img.order() == 1) {
      found = true;
      EXPECT_NEAR(img.position[0], -1.0, 1e-15);
      EXPECT_EQ(img.position[1], 3.5);
      EXPECT_EQ(img.position[2], 2.1);
      EXPECT_DOUBLE_EQ(img.attenuation, 0.45);
      EXPECT_TRUE(img.parity[0]);
      EXPECT_FALSE(img.parity[1] || img.parity[2]);
    }
  }
  EXPECT_TRUE(found);
}

TEST(Images, LatticeInvariants) {
  const auto imgs = enumerate_images(kRoom, kSource, kCenter, ImageSelection::max_order(4));
  // Images of order <= k in 3-D: sum over axes of the 1-D counts with total order <= k.
  EXPECT_EQ(imgs.size(), 129u);
  for (std::size_t i = 0; i < imgs.size(); ++i) {
    const auto& img = imgs[i];
    double att = 1.0;
    for (int w = 0; w < 6; ++w) att *= std::pow(kRoom.beta[w], img.counts[w]);
    EXPECT_NEAR(img.attenuation, att, 1e-15);
    for (int a = 0; a < 3; ++a) {
      EXPECT_EQ(img.parity[a], ((img.counts[2 * a] + img.counts[2 * a + 1]) % 2) == 1);
      // x_image = 2 l L +- x_s
      const double L = kRoom.dimensions[a];
      const double base = 2.0 * img.lattice[a] * L;
      const double expect = base + (img.parity[a] ? -kSource[a] : kSource[a]);
      EXPECT_NEAR(img.position[a], expect, 1e-12);
    }
    EXPECT_NEAR(img.distance, norm(img.position - kCenter), 1e-12);
    if (i) EXPECT_LE(imgs[i - 1].distance, img.distance);
  }
}

TEST(Images, CountModeIsAPrefix) {
  const auto all = enumerate_images(kRoom, kSource, kCenter, ImageSelection::count(60));
  const auto some = enumerate_images(kRoom, kSource, kCenter, ImageSelection::count(24));
  ASSERT_EQ(all.size(), 60u);
  ASSERT_EQ(some.size(), 24u);
  for (std::size_t i = 0; i < some.size(); ++i) EXPECT_EQ(some[i].position, all[i].position);
  EXPECT_EQ(some[0].order(), 0);
}

TEST(Images, SourceOutsideRoomIsRejected) {
  EXPECT_THROW(enumerate_images(kRoom, {0.0, 1.0, 1.0}, kCenter, ImageSelection::count(3)), Error);
  EXPECT_THROW(enumerate_images(kRoom, {5.0, 1.0, 1.0}, kCenter, ImageSelection::count(3)), Error);
}

TEST(Reflect, MatchesMirroredEvaluation) {
  std::mt19937 rng(5);
  const SHMatrix c = test::random_sh(5, rng);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int mask = 0; mask < 8; ++mask) {
    const std::array<bool, 3> par{(mask & 1) != 0, (mask & 2) != 0, (mask & 4) != 0};
    const SHMatrix r = reflect_sh(c, par);
    for (int k = 0; k < 20; ++k) {
      const double th = std::acos(2.0 * u(rng) - 1.0), ph = 2.0 * M_PI * u(rng);
      Vec3 x = unit_vector(th, ph);
      for (int a = 0; a < 3; ++a)
        if (par[a]) x[a] = -x[a];
      const SphericalAngles m = direction_angles(x);
      EXPECT_NEAR(std::abs(r.evaluate(th, ph) - c.evaluate(m.theta, m.phi)), 0.0, 1e-9) << mask;
    }
  }
}

TEST(Reflect, CardioidZFlip) {
  SHMatrix card(1);
  card(0, 0) = std::sqrt(M_PI);
  card(1, 0) = std::sqrt(M_PI / 3.0);
  const SHMatrix r = reflect_sh(card, {false, false, true});
  EXPECT_NEAR(r(0, 0).real(), std::sqrt(M_PI), 1e-15);
  EXPECT_NEAR(r(1, 0).real(), -std::sqrt(M_PI / 3.0), 1e-15);
  const SHMatrix id = reflect_sh(card, {false, false, false});
  for (std::size_t i = 0; i < card.size(); ++i) EXPECT_EQ(id.coeffs()[i], card.coeffs()[i]);
}

TEST(FrameAlign, KnownDirections) {
  const Vec3 c{1.0, 2.0, 0.5};
  const FrameAlignment up = frame_align(c, c + Vec3{0.0, 0.0, 1.7});
  EXPECT_NEAR(up.distance, 1.7, 1e-15);
  EXPECT_NEAR(up.to_source_frame.beta, 0.0, 1e-15);

  const FrameAlignment px = frame_align(c, c + Vec3{2.0, 0.0, 0.0});
  EXPECT_NEAR(px.distance, 2.0, 1e-15);
  EXPECT_NEAR(std::abs(px.to_source_frame.beta), M_PI / 2, 1e-12);

  EXPECT_THROW(frame_align(c, c), Error);

  std::mt19937 rng(2);
  std::normal_distribution<double> g;
  for (int i = 0; i < 20; ++i) {
    const Vec3 d{g(rng), g(rng), g(rng)};
    const FrameAlignment f = frame_align(c, c + d);
    const Eigen::Matrix3d prod = f.to_source_frame.matrix() * f.back.matrix();
    EXPECT_LT((prod - Eigen::Matrix3d::Identity()).norm(), 1e-12);
    // The source-frame coefficients of a function concentrated along d sit on +z.
    const Eigen::Vector3d dz = f.to_source_frame.matrix() * Eigen::Vector3d(d[0], d[1], d[2]).normalized();
    EXPECT_NEAR(dz.z(), 1.0, 1e-12);
  }
}

TEST(Engine, SuperpositionIsExact) {
  const SimulationConfig cfg = small_config();
  const auto imgs = enumerate_images(kRoom, kSource, kCenter, ImageSelection::count(10));
  SourceSpec src;
  src.position = kSource;
  src.directivity = AnalyticPattern::parse("cardioid");
  const SHTimeSeries gamma = source_coefficients(src, cfg.fs);

  SimulationConfig fixed = cfg;
  fixed.duration_s = 0.05;
  const SHTimeSeries whole = simulate_images(imgs, gamma, kCenter, 0.042, fixed);
  const SHTimeSeries a = simulate_images({imgs.begin(), imgs.begin() + 4}, gamma, kCenter, 0.042, fixed);
  const SHTimeSeries b = simulate_images({imgs.begin() + 4, imgs.end()}, gamma, kCenter, 0.042, fixed);
  SHTimeSeries sum = a;
  for (std::size_t i = 0; i < sum.data().size(); ++i) sum.data()[i] += b.data()[i];
  EXPECT_LT(max_diff(whole, sum), 1e-12 * whole.max_abs());
}

TEST(Engine, ZeroReflectionEqualsAnechoic) {
  SimulationConfig cfg = small_config();
  cfg.duration_s = 0.04;
  RoomSpec dead = kRoom;
  dead.beta.fill(0.0);
  SourceSpec src;
  src.position = kSource;
  src.directivity = AnalyticPattern::parse("cardioid");

  SimulationConfig reflect = cfg;
  reflect.images = ImageSelection::max_order(2);
  SimulationConfig direct = cfg;
  direct.images = ImageSelection::count(1);
  EXPECT_EQ(max_diff(simulate_rir_sh(dead, src, kCenter, 0.042, reflect),
                     simulate_rir_sh(kRoom, src, kCenter, 0.042, direct)),
            0.0);
}

TEST(Engine, WallBetaScalesOnlyItsImages) {
  const SimulationConfig cfg = small_config();
  SourceSpec src;
  src.position = kSource;
  const SHTimeSeries gamma = source_coefficients(src, cfg.fs);
  const auto imgs = enumerate_images(kRoom, kSource, kCenter, ImageSelection::max_order(1));
  for (const auto& img : imgs) {
    if (img.order() != 1) continue;
    ImageSource half = img;
    half.attenuation *= 0.5;
    const SHTimeSeries full = image_contribution(img, gamma, kCenter, 0.042, cfg);
    const SHTimeSeries part = image_contribution(half, gamma, kCenter, 0.042, cfg);
    for (std::size_t i = 0; i < full.data().size(); ++i)
      EXPECT_NEAR(std::abs(part.data()[i] - 0.5 * full.data()[i]), 0.0, 1e-15 * full.max_abs());
  }
}

TEST(Engine, ContributionSupport) {
  SimulationConfig cfg = small_config();
  cfg.sampling = KernelSampling::Point;
  SourceSpec src;
  src.position = kSource;
  const SHTimeSeries gamma = source_coefficients(src, cfg.fs);
  for (const auto& img : enumerate_images(kRoom, kSource, kCenter, ImageSelection::count(12))) {
    const SHTimeSeries c = image_contribution(img, gamma, kCenter, 0.042, cfg);
    const double rs = norm(img.position - kCenter);
    const double lo = (rs - 0.042) / cfg.speed_of_sound * cfg.fs, hi = (rs + 0.042) / cfg.speed_of_sound * cfg.fs;
    EXPECT_GE(static_cast<double>(c.start()), std::floor(lo));
    EXPECT_LE(static_cast<double>(c.start()) + static_cast<double>(c.frames()) - 1.0, std::ceil(hi));
  }
}

TEST(Engine, NearFieldAndProtrusionErrors) {
  const SimulationConfig cfg = small_config();
  SourceSpec src;
  src.position = {2.52, 3.5, 2.1};
  EXPECT_THROW(simulate_rir_sh(kRoom, src, kCenter, 0.042, cfg), ModelError);
  src.position = kSource;
  EXPECT_THROW(simulate_rir_sh(kRoom, src, {0.02, 3.5, 2.1}, 0.042, cfg), Error);
}

TEST(Engine, ThreadCountDoesNotChangeOutput) {
  SimulationConfig one = small_config();
  one.threads = 1;
  SimulationConfig many = one;
  many.threads = 5;
  SourceSpec src;
  src.position = kSource;
  src.directivity = AnalyticPattern::parse("hypercardioid");
  EXPECT_EQ(max_diff(simulate_rir_sh(kRoom, src, kCenter, 0.042, one), simulate_rir_sh(kRoom, src, kCenter, 0.042, many)),
            0.0);
}
