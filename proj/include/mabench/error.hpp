#pragma once

#include <stdexcept>
#include <string>

namespace mabench {

/// Problems with user-supplied data: manifests, config, waveform contracts.
/// The CLI maps these to exit code 1.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Problems talking to an external service (editor/judge/TTS/ALLM endpoints).
/// The CLI maps these to exit code 2.
struct ServiceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mabench
