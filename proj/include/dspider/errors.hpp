#pragma once

#include <stdexcept>
#include <string>

namespace dspider {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// topology
struct NotSymmetric : Error { using Error::Error; };
struct NotDoublyStochastic : Error { using Error::Error; };
struct SpectralGapViolation : Error { using Error::Error; };

// problems
struct InvalidDimension : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };
struct EmptyBatch : Error { using Error::Error; };
struct TooManyWorkers : Error { using Error::Error; };
struct DiscreteLabelsRequired : Error { using Error::Error; };

// algorithms
struct DimensionMismatch : Error { using Error::Error; };
struct CalledBeforeFirstStep : Error { using Error::Error; };
struct InvalidBatchConfig : Error { using Error::Error; };

// theory
struct InadmissibleSpectrum : Error { using Error::Error; };
struct NonpositiveD : Error { using Error::Error; };

// harness / cli
struct EmptyWindow : Error { using Error::Error; };
struct ConfigParseError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace dspider
