// SPDX-License-Identifier: Apache-2.0

#ifndef WSR_SCENARIO_HPP
#define WSR_SCENARIO_HPP

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wsr/rng.hpp"

namespace wsr {

using Vec3 = std::array<double, 3>;

/// Placement and large-scale fading parameters for random scenario draws.
/// Attenuation follows kappa(d) = 10^(t0_db/10) * (d/d0)^(-pathloss_exp).
/// With pathloss_exp = 0 and t0_db = 0 the channel gains are unit scale.
struct GeometryConfig {
  Vec3 tx_center{0.0, 0.0, 10.0};    // base station / transmitter cluster center
  Vec3 rx_center{200.0, 30.0, 0.0};  // user / receiver cluster center
  double cluster_radius = 10.0;      // meters
  double t0_db = 0.0;                // reference loss at d0, in dB
  double d0 = 1.0;                   // reference distance, meters
  double pathloss_exp = 0.0;
  std::uint64_t seed = 1;
};

inline double distance(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Linear attenuation kappa(d) = 10^(t0_db/10) * (d/d0)^(-pathloss_exp).
inline double path_loss(double d, const GeometryConfig& geo) {
  if (!(d > 0.0)) throw std::domain_error("path_loss: distance must be positive");
  return std::pow(10.0, geo.t0_db / 10.0) * std::pow(d / geo.d0, -geo.pathloss_exp);
}

/// Downlink broadcast instance: one M-antenna transmitter, K single-antenna
/// users. Immutable after construction; channels are stored as columns of an
/// M x K matrix (column k is user k's channel).
struct MisoScenario {
  int num_users = 0;
  int num_antennas = 0;
  Eigen::MatrixXcd channels;    // M x K
  Eigen::VectorXd weights;      // K
  Eigen::VectorXd noise_power;  // K, sigma_k^2
  double power_budget = 0.0;    // linear scale

  void validate() const {
    if (num_users < 1 || num_antennas < 1)
      throw std::invalid_argument("MisoScenario: need at least one user and one antenna");
    if (channels.rows() != num_antennas || channels.cols() != num_users)
      throw std::invalid_argument("MisoScenario: channel matrix shape mismatch");
    if (weights.size() != num_users || noise_power.size() != num_users)
      throw std::invalid_argument("MisoScenario: weight/noise length mismatch");
    if ((weights.array() < 0.0).any())
      throw std::invalid_argument("MisoScenario: weights must be nonnegative");
    if (!(noise_power.array() > 0.0).all())
      throw std::invalid_argument("MisoScenario: noise powers must be positive");
    if (!(power_budget > 0.0))
      throw std::invalid_argument("MisoScenario: power budget must be positive");
  }
};

/// Interference channel instance: K transmitter/receiver pairs. channels[i][j]
/// is the Mr[i] x Mt[j] channel from transmitter j to receiver i.
struct MimoScenario {
  int num_links = 0;
  Eigen::VectorXi tx_antennas;  // Mt[k]
  Eigen::VectorXi rx_antennas;  // Mr[k]
  Eigen::VectorXi streams;      // Ms[k] <= min(Mt[k], Mr[k])
  std::vector<std::vector<Eigen::MatrixXcd>> channels;
  Eigen::VectorXd weights;
  Eigen::VectorXd noise_power;
  Eigen::VectorXd power_budgets;  // per link, linear

  void validate() const {
    const int K = num_links;
    if (K < 1) throw std::invalid_argument("MimoScenario: need at least one link");
    if (tx_antennas.size() != K || rx_antennas.size() != K || streams.size() != K ||
        weights.size() != K || noise_power.size() != K || power_budgets.size() != K)
      throw std::invalid_argument("MimoScenario: per-link array length mismatch");
    for (int k = 0; k < K; ++k) {
      if (streams(k) < 1 || streams(k) > std::min(tx_antennas(k), rx_antennas(k)))
        throw std::invalid_argument("MimoScenario: streams must satisfy 1 <= Ms <= min(Mt, Mr)");
      if (!(noise_power(k) > 0.0) || !(power_budgets(k) > 0.0) || weights(k) < 0.0)
        throw std::invalid_argument("MimoScenario: invalid weight/noise/power entry");
    }
    if (static_cast<int>(channels.size()) != K)
      throw std::invalid_argument("MimoScenario: channel table must be K x K");
    for (int i = 0; i < K; ++i) {
      if (static_cast<int>(channels[i].size()) != K)
        throw std::invalid_argument("MimoScenario: channel table must be K x K");
      for (int j = 0; j < K; ++j)
        if (channels[i][j].rows() != rx_antennas(i) || channels[i][j].cols() != tx_antennas(j))
          throw std::invalid_argument("MimoScenario: channel block shape mismatch");
    }
  }
};

/// Transmit beamformers. MISO: M x K matrix, column k serves user k.
using MisoBeamformers = Eigen::MatrixXcd;
/// MIMO: W[k] is Mt[k] x Ms[k].
using MimoBeamformers = std::vector<Eigen::MatrixXcd>;

inline double total_power(const MisoBeamformers& bf) { return bf.squaredNorm(); }

inline double per_link_power(const MimoBeamformers& bf, int k) {
  return bf.at(static_cast<std::size_t>(k)).squaredNorm();
}

inline bool is_feasible(const MisoScenario& scn, const MisoBeamformers& bf,
                        double rel_tol = 1e-9) {
  return total_power(bf) <= scn.power_budget * (1.0 + rel_tol);
}

inline bool is_feasible(const MimoScenario& scn, const MimoBeamformers& bf,
                        double rel_tol = 1e-9) {
  for (int k = 0; k < scn.num_links; ++k)
    if (per_link_power(bf, k) > scn.power_budgets(k) * (1.0 + rel_tol)) return false;
  return true;
}

namespace detail {

inline Vec3 draw_disk_point(SplitMix64& rng, const Vec3& center, double radius) {
  const double ur = rng.uniform();
  const double ut = rng.uniform();
  const double r = radius * std::sqrt(ur);
  const double th = 2.0 * M_PI * ut;
  return {center[0] + r * std::cos(th), center[1] + r * std::sin(th), center[2]};
}

}  // namespace detail

/// Rayleigh-fading broadcast instance: user positions uniform in the disk
/// around rx_center, channel entries CN(0, kappa(d_k)). Draw order: all user
/// positions first, then channels user by user.
inline MisoScenario generate_miso(const GeometryConfig& geo, int num_users, int num_antennas,
                                  const Eigen::VectorXd& weights,
                                  const Eigen::VectorXd& noise_power, double power_budget) {
  if (num_users < 1 || num_antennas < 1)
    throw std::invalid_argument("generate_miso: need K >= 1 and M >= 1");
  SplitMix64 rng(geo.seed);
  std::vector<Vec3> pos(static_cast<std::size_t>(num_users));
  for (auto& p : pos) p = detail::draw_disk_point(rng, geo.rx_center, geo.cluster_radius);

  MisoScenario scn;
  scn.num_users = num_users;
  scn.num_antennas = num_antennas;
  scn.channels.resize(num_antennas, num_users);
  for (int k = 0; k < num_users; ++k) {
    const double gain = std::sqrt(path_loss(distance(geo.tx_center, pos[static_cast<std::size_t>(k)]), geo));
    for (int m = 0; m < num_antennas; ++m) scn.channels(m, k) = gain * rng.complex_gaussian();
  }
  scn.weights = weights;
  scn.noise_power = noise_power;
  scn.power_budget = power_budget;
  scn.validate();
  return scn;
}

/// Interference-channel instance: transmitter and receiver positions each
/// uniform in their own disk; H[i][j] entries CN(0, kappa(dist(rx_i, tx_j))).
/// Draw order: transmitter positions, receiver positions, then channel blocks
/// in receiver-major order with row-major entries.
inline MimoScenario generate_mimo(const GeometryConfig& geo, int num_links,
                                  const Eigen::VectorXi& tx_antennas,
                                  const Eigen::VectorXi& rx_antennas,
                                  const Eigen::VectorXi& streams, const Eigen::VectorXd& weights,
                                  const Eigen::VectorXd& noise_power,
                                  const Eigen::VectorXd& power_budgets) {
  if (num_links < 1) throw std::invalid_argument("generate_mimo: need K >= 1");
  SplitMix64 rng(geo.seed);
  std::vector<Vec3> tx_pos(static_cast<std::size_t>(num_links));
  std::vector<Vec3> rx_pos(static_cast<std::size_t>(num_links));
  for (auto& p : tx_pos) p = detail::draw_disk_point(rng, geo.tx_center, geo.cluster_radius);
  for (auto& p : rx_pos) p = detail::draw_disk_point(rng, geo.rx_center, geo.cluster_radius);

  MimoScenario scn;
  scn.num_links = num_links;
  scn.tx_antennas = tx_antennas;
  scn.rx_antennas = rx_antennas;
  scn.streams = streams;
  scn.channels.assign(static_cast<std::size_t>(num_links),
                      std::vector<Eigen::MatrixXcd>(static_cast<std::size_t>(num_links)));
  for (int i = 0; i < num_links; ++i) {
    for (int j = 0; j < num_links; ++j) {
      const double gain = std::sqrt(path_loss(
          distance(rx_pos[static_cast<std::size_t>(i)], tx_pos[static_cast<std::size_t>(j)]), geo));
      Eigen::MatrixXcd h(rx_antennas(i), tx_antennas(j));
      for (Eigen::Index r = 0; r < h.rows(); ++r)
        for (Eigen::Index c = 0; c < h.cols(); ++c) h(r, c) = gain * rng.complex_gaussian();
      scn.channels[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::move(h);
    }
  }
  scn.weights = weights;
  scn.noise_power = noise_power;
  scn.power_budgets = power_budgets;
  scn.validate();
  return scn;
}

/// i.i.d. complex Gaussian beamformers scaled so the total power equals the
/// budget exactly.
inline MisoBeamformers random_miso_beamformers(const MisoScenario& scn, SplitMix64& rng) {
  Eigen::MatrixXcd w(scn.num_antennas, scn.num_users);
  for (Eigen::Index c = 0; c < w.cols(); ++c)
    for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = rng.complex_gaussian();
  const double p = w.squaredNorm();
  if (p > 0.0) w *= std::sqrt(scn.power_budget / p);
  return w;
}

/// Matched filters with an equal split of the power budget.
inline MisoBeamformers matched_filter_beamformers(const MisoScenario& scn) {
  Eigen::MatrixXcd w(scn.num_antennas, scn.num_users);
  const double per_user = scn.power_budget / scn.num_users;
  for (int k = 0; k < scn.num_users; ++k) {
    const double n = scn.channels.col(k).norm();
    w.col(k) = n > 0.0 ? Eigen::VectorXcd(std::sqrt(per_user) * scn.channels.col(k) / n)
                       : Eigen::VectorXcd::Zero(scn.num_antennas);
  }
  return w;
}

/// Per-link i.i.d. complex Gaussian beamformers at full per-link power.
inline MimoBeamformers random_mimo_beamformers(const MimoScenario& scn, SplitMix64& rng) {
  MimoBeamformers bf(static_cast<std::size_t>(scn.num_links));
  for (int k = 0; k < scn.num_links; ++k) {
    Eigen::MatrixXcd w(scn.tx_antennas(k), scn.streams(k));
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.complex_gaussian();
    const double p = w.squaredNorm();
    if (p > 0.0) w *= std::sqrt(scn.power_budgets(k) / p);
    bf[static_cast<std::size_t>(k)] = std::move(w);
  }
  return bf;
}

// ---- JSON serialization (complex numbers as [re, im] pairs) ----

namespace detail {

inline nlohmann::json cvec_to_json(const Eigen::VectorXcd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out.push_back({v(i).real(), v(i).imag()});
  return out;
}

inline nlohmann::json cmat_to_json(const Eigen::MatrixXcd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::VectorXcd cvec_from_json(const nlohmann::json& j) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = {j[i][0].get<double>(), j[i][1].get<double>()};
  return v;
}

inline Eigen::MatrixXcd cmat_from_json(const nlohmann::json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = {j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)][0].get<double>(),
                 j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)][1].get<double>()};
  return m;
}

}  // namespace detail

inline nlohmann::json to_json(const MisoScenario& scn) {
  nlohmann::json j;
  j["kind"] = "miso";
  j["num_users"] = scn.num_users;
  j["num_antennas"] = scn.num_antennas;
  nlohmann::json ch = nlohmann::json::array();
  for (int k = 0; k < scn.num_users; ++k)
    ch.push_back(detail::cvec_to_json(scn.channels.col(k)));
  j["channels"] = std::move(ch);
  j["weights"] = std::vector<double>(scn.weights.data(), scn.weights.data() + scn.weights.size());
  j["noise_power"] =
      std::vector<double>(scn.noise_power.data(), scn.noise_power.data() + scn.noise_power.size());
  j["power_budget"] = scn.power_budget;
  return j;
}

inline MisoScenario miso_from_json(const nlohmann::json& j) {
  MisoScenario scn;
  if (j.value("kind", "") != "miso") throw std::invalid_argument("miso_from_json: kind != miso");
  scn.num_users = j.at("num_users").get<int>();
  scn.num_antennas = j.at("num_antennas").get<int>();
  scn.channels.resize(scn.num_antennas, scn.num_users);
  for (int k = 0; k < scn.num_users; ++k)
    scn.channels.col(k) = detail::cvec_from_json(j.at("channels").at(static_cast<std::size_t>(k)));
  const auto w = j.at("weights").get<std::vector<double>>();
  const auto n = j.at("noise_power").get<std::vector<double>>();
  scn.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  scn.noise_power = Eigen::Map<const Eigen::VectorXd>(n.data(), static_cast<Eigen::Index>(n.size()));
  scn.power_budget = j.at("power_budget").get<double>();
  scn.validate();
  return scn;
}

inline nlohmann::json to_json(const MimoScenario& scn) {
  nlohmann::json j;
  j["kind"] = "mimo";
  j["num_links"] = scn.num_links;
  auto veci = [](const Eigen::VectorXi& v) {
    return std::vector<int>(v.data(), v.data() + v.size());
  };
  auto vecd = [](const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  j["tx_antennas"] = veci(scn.tx_antennas);
  j["rx_antennas"] = veci(scn.rx_antennas);
  j["streams"] = veci(scn.streams);
  nlohmann::json ch = nlohmann::json::array();
  for (int i = 0; i < scn.num_links; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j2 = 0; j2 < scn.num_links; ++j2)
      row.push_back(detail::cmat_to_json(
          scn.channels[static_cast<std::size_t>(i)][static_cast<std::size_t>(j2)]));
    ch.push_back(std::move(row));
  }
  j["channels"] = std::move(ch);
  j["weights"] = vecd(scn.weights);
  j["noise_power"] = vecd(scn.noise_power);
  j["power_budgets"] = vecd(scn.power_budgets);
  return j;
}

inline MimoScenario mimo_from_json(const nlohmann::json& j) {
  MimoScenario scn;
  if (j.value("kind", "") != "mimo") throw std::invalid_argument("mimo_from_json: kind != mimo");
  scn.num_links = j.at("num_links").get<int>();
  auto to_veci = [](const nlohmann::json& a) {
    const auto v = a.get<std::vector<int>>();
    return Eigen::VectorXi(Eigen::Map<const Eigen::VectorXi>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  auto to_vecd = [](const nlohmann::json& a) {
    const auto v = a.get<std::vector<double>>();
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  scn.tx_antennas = to_veci(j.at("tx_antennas"));
  scn.rx_antennas = to_veci(j.at("rx_antennas"));
  scn.streams = to_veci(j.at("streams"));
  scn.channels.assign(static_cast<std::size_t>(scn.num_links),
                      std::vector<Eigen::MatrixXcd>(static_cast<std::size_t>(scn.num_links)));
  for (std::size_t i = 0; i < scn.channels.size(); ++i)
    for (std::size_t j2 = 0; j2 < scn.channels.size(); ++j2)
      scn.channels[i][j2] = detail::cmat_from_json(j.at("channels").at(i).at(j2));
  scn.weights = to_vecd(j.at("weights"));
  scn.noise_power = to_vecd(j.at("noise_power"));
  scn.power_budgets = to_vecd(j.at("power_budgets"));
  scn.validate();
  return scn;
}

}  // namespace wsr

#endif  // WSR_SCENARIO_HPP
