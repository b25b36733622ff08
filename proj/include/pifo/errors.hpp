#pragma once

#include <stdexcept>
#include <string>

namespace pifo {

enum class ErrorCode {
  CapacityExceeded,
  EmptyPifo,
  UnknownLogicalPifo,
  SyntaxError,
  SemanticError,
  ArithmeticError,
  UnknownBuiltin,
  MultipleLeafMatch,
  NoLeafMatch,
  PredicateNotNested,
  BrokenChain,
  TooManyBlocks,
  RankStoreFull,
  FlowTableFull,
  DequeueTooSoon,
  EmptyLogicalPifo,
  InvalidSpec,
  IoError,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::EmptyPifo: return "EmptyPifo";
    case ErrorCode::UnknownLogicalPifo: return "UnknownLogicalPifo";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::SemanticError: return "SemanticError";
    case ErrorCode::ArithmeticError: return "ArithmeticError";
    case ErrorCode::UnknownBuiltin: return "UnknownBuiltin";
    case ErrorCode::MultipleLeafMatch: return "MultipleLeafMatch";
    case ErrorCode::NoLeafMatch: return "NoLeafMatch";
    case ErrorCode::PredicateNotNested: return "PredicateNotNested";
    case ErrorCode::BrokenChain: return "BrokenChain";
    case ErrorCode::TooManyBlocks: return "TooManyBlocks";
    case ErrorCode::RankStoreFull: return "RankStoreFull";
    case ErrorCode::FlowTableFull: return "FlowTableFull";
    case ErrorCode::DequeueTooSoon: return "DequeueTooSoon";
    case ErrorCode::EmptyLogicalPifo: return "EmptyLogicalPifo";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pifo
