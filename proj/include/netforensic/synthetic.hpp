#pragma once

#include <cstdint>
#include <random>

#include "netforensic/flow_model.hpp"

namespace nf {

struct SeparationSpec {
    std::size_t n_normal = 5000;
    std::size_t n_attack = 5000;
    std::size_t dimension = 8;
    double attack_shift = 3.0;  // attack mean on every coordinate
    std::uint64_t seed = 1;
};

/// Labeled flows whose features are standard normal around the origin
/// (normal) or around (shift, ..., shift) (attack). Attack rows carry the
/// class "Exploits". Features are named f1..fD.
Dataset make_separation_dataset(const SeparationSpec& spec);

/// Standard normal draw (Box-Muller on mt19937_64 output).
double standard_normal(std::mt19937_64& rng);

}  // namespace nf
