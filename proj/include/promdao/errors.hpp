// Copyright (c) 2026 the promdao project developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace promdao {

enum class Errc {
  ZeroMatrix,
  DimensionMismatch,
  NonOrthonormalInput,
  NotOnManifold,
  LogarithmUndefined,
  NoConvergence,
  InvalidConfig,
  InvalidParameter,
  OutOfBounds,
  NotSpd,
  SingularSystem,
  EmptyCandidateSet,
  EmptyDatabase,
  SingularKernelMatrix,
  InconsistentDatabase,
  SingularCalA,
  DegenerateMode,
  QpInfeasible,
  InfeasibleStart,
  IoError,
  FormatVersionMismatch,
  DigestMismatch,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::ZeroMatrix: return "ZeroMatrix";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NonOrthonormalInput: return "NonOrthonormalInput";
    case Errc::NotOnManifold: return "NotOnManifold";
    case Errc::LogarithmUndefined: return "LogarithmUndefined";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::InvalidParameter: return "InvalidParameter";
    case Errc::OutOfBounds: return "OutOfBounds";
    case Errc::NotSpd: return "NotSpd";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::EmptyCandidateSet: return "EmptyCandidateSet";
    case Errc::EmptyDatabase: return "EmptyDatabase";
    case Errc::SingularKernelMatrix: return "SingularKernelMatrix";
    case Errc::InconsistentDatabase: return "InconsistentDatabase";
    case Errc::SingularCalA: return "SingularCalA";
    case Errc::DegenerateMode: return "DegenerateMode";
    case Errc::QpInfeasible: return "QpInfeasible";
    case Errc::InfeasibleStart: return "InfeasibleStart";
    case Errc::IoError: return "IoError";
    case Errc::FormatVersionMismatch: return "FormatVersionMismatch";
    case Errc::DigestMismatch: return "DigestMismatch";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace promdao
