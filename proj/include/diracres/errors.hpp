#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace diracres {

enum class ErrorKind {
  Dimension,
  NonFinite,
  SingularMatrix,
  NotNearSingular,
  ConvergenceFailure,
  IndexOutOfRange,
  BranchCut,
  ChartSwitchRequired,
  ContinuationFailure,
  PoleAtOrigin,
  OracleDomain,
  CutoffOrder,
  Resolution,
  GridMismatch,
  SupportViolation,
  PhaseUnwrapFailure,
  RefineFailure,
  ContourFailure,
  HermitianRequired,
  InvalidArgument,
  Format,
  Config,
};

inline std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Dimension: return "Dimension";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::NotNearSingular: return "NotNearSingular";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::BranchCut: return "BranchCut";
    case ErrorKind::ChartSwitchRequired: return "ChartSwitchRequired";
    case ErrorKind::ContinuationFailure: return "ContinuationFailure";
    case ErrorKind::PoleAtOrigin: return "PoleAtOrigin";
    case ErrorKind::OracleDomain: return "OracleDomain";
    case ErrorKind::CutoffOrder: return "CutoffOrder";
    case ErrorKind::Resolution: return "Resolution";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::SupportViolation: return "SupportViolation";
    case ErrorKind::PhaseUnwrapFailure: return "PhaseUnwrapFailure";
    case ErrorKind::RefineFailure: return "RefineFailure";
    case ErrorKind::ContourFailure: return "ContourFailure";
    case ErrorKind::HermitianRequired: return "HermitianRequired";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Format: return "Format";
    case ErrorKind::Config: return "Config";
  }
  return "Unknown";
}

/// Base of every error raised by the library. `kind()` is stable and is what
/// the CLI serializes into its machine-readable error record.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class SingularMatrixError : public Error {
 public:
  SingularMatrixError(std::size_t pivot, const std::string& what)
      : Error(ErrorKind::SingularMatrix, what), pivot_(pivot) {}
  std::size_t pivot_index() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(ErrorKind::Config, what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace diracres
