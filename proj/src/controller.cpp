#include "swarmevo/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "swarmevo/io.hpp"
#include "swarmevo/rng.hpp"

namespace swarmevo {

ReservoirWeights ReservoirWeights::generate(std::uint64_t seed) {
  ReservoirWeights w;
  w.seed = seed;
  Rng rng(seed);
  for (auto* m : {&w.hidden1, &w.hidden2})
    for (auto& row : *m)
      for (auto& x : row) x = rng.uniform(-kReservoirBound, kReservoirBound);
  return w;
}

Genotype Genotype::from(std::span<const double> genes) {
  if (genes.size() != kGenes)
    throw std::invalid_argument("genotype needs " + std::to_string(kGenes) + " genes, got " +
                                std::to_string(genes.size()));
  Genotype g;
  for (std::size_t i = 0; i < kGenes; ++i) {
    if (!(std::abs(genes[i]) <= kGeneBound))
      throw std::invalid_argument("gene " + std::to_string(i) + " outside [-10, 10]");
    g.genes_[i] = genes[i];
  }
  return g;
}

Genotype Genotype::clamped(std::span<const double> genes) {
  if (genes.size() != kGenes)
    throw std::invalid_argument("genotype needs " + std::to_string(kGenes) + " genes, got " +
                                std::to_string(genes.size()));
  Genotype g;
  for (std::size_t i = 0; i < kGenes; ++i) {
    if (std::isnan(genes[i])) throw std::invalid_argument("NaN gene");
    g.genes_[i] = std::clamp(genes[i], -kGeneBound, kGeneBound);
  }
  return g;
}

OutputLayer decode(std::span<const double> genes) {
  if (genes.size() != kGenes)
    throw std::invalid_argument("decode: expected " + std::to_string(kGenes) + " genes, got " +
                                std::to_string(genes.size()));
  OutputLayer layer{};
  for (std::size_t r = 0; r < kOutputDim; ++r)
    for (std::size_t c = 0; c < kSensorDim; ++c) layer[r][c] = genes[r * kSensorDim + c];
  return layer;
}

OutputLayer decode(const Genotype& genotype) { return decode(std::span<const double>(genotype.genes())); }

Genotype encode(const OutputLayer& layer) {
  std::array<double, kGenes> flat{};
  for (std::size_t r = 0; r < kOutputDim; ++r)
    for (std::size_t c = 0; c < kSensorDim; ++c) flat[r * kSensorDim + c] = layer[r][c];
  return Genotype::from(flat);
}

double activate(Activation act, double x) {
  switch (act) {
    case Activation::relu:
      return x > 0.0 ? x : 0.0;
    case Activation::softplus:
      // log(1 + e^x) without overflow for large x.
      return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
  }
  return x;
}

ControllerOutput forward(const ReservoirWeights& reservoir, const OutputLayer& out_layer,
                         const SensorVector& inputs, const ControllerOptions& options) {
  for (double s : inputs)
    if (!std::isfinite(s)) throw std::invalid_argument("non-finite controller input");

  const auto layer = [&](const HiddenMatrix& m, const SensorVector& in) {
    SensorVector out{};
    for (std::size_t r = 0; r < kSensorDim; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < kSensorDim; ++c) acc += m[r][c] * in[c];
      out[r] = activate(options.hidden, acc);
    }
    return out;
  };
  const SensorVector h1 = layer(reservoir.hidden1, inputs);
  const SensorVector h2 = layer(reservoir.hidden2, h1);

  std::array<double, kOutputDim> out{};
  for (std::size_t r = 0; r < kOutputDim; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < kSensorDim; ++c) acc += out_layer[r][c] * h2[c];
    out[r] = std::tanh(acc);
  }

  ControllerOutput result;
  result.w = out[0];
  result.v = options.velocity == VelocityMapping::affine ? (out[1] - 1.0) / 2.0
                                                         : std::min(out[1], 0.0);
  return result;
}

Controller::Controller(std::shared_ptr<const ReservoirWeights> reservoir, const Genotype& genotype,
                       ControllerOptions options)
    : reservoir_(std::move(reservoir)), layer_(decode(genotype)), options_(options) {
  if (!reservoir_) throw std::invalid_argument("controller needs a reservoir");
}

std::string format_genotype(const Genotype& genotype) {
  return io::join(genotype.genes(), ' ');
}

Genotype parse_genotype(std::string_view line) {
  std::vector<double> genes;
  for (auto tok : io::split_fields(line)) genes.push_back(io::parse_double(tok));
  return Genotype::from(genes);
}

std::string_view to_string(Activation act) { return act == Activation::relu ? "relu" : "softplus"; }

std::string_view to_string(VelocityMapping mapping) {
  return mapping == VelocityMapping::clamp ? "clamp" : "affine";
}

Activation parse_activation(std::string_view name) {
  if (name == "softplus") return Activation::softplus;
  if (name == "relu") return Activation::relu;
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

VelocityMapping parse_velocity_mapping(std::string_view name) {
  if (name == "affine") return VelocityMapping::affine;
  if (name == "clamp") return VelocityMapping::clamp;
  throw std::invalid_argument("unknown velocity mapping '" + std::string(name) + "'");
}

}  // namespace swarmevo
