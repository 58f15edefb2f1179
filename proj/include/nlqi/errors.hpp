#pragma once

#include <stdexcept>
#include <string>

namespace nlqi {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Config file failed to parse or violated a constants invariant.
struct ConfigError : Error {
    using Error::Error;
};

// A resolvent denominator collided with the manifold energy.
struct PoleError : Error {
    PoleError(std::string level_name, double energy_MHz)
        : Error("resolvent pole: level " + level_name + " sits at " +
                std::to_string(energy_MHz) + " MHz, inside the on-resonance tolerance"),
          level(std::move(level_name)),
          energy(energy_MHz) {}
    std::string level;
    double energy;
};

// Field amplitude exceeds the perturbative ceiling and no override was given.
struct FieldCeilingError : Error {
    using Error::Error;
};

// Manifold tracking could not assign eigenvectors unambiguously.
struct DegeneracyError : Error {
    using Error::Error;
};

// A fitted operator decomposition left residual above tolerance.
struct DecompositionError : Error {
    using Error::Error;
};

// Generic precondition violation on an operation's inputs.
struct DomainError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace nlqi
