#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace speclhs {

/// Base error carrying a stable machine-parsable tag alongside the message.
/// The CLI prints errors as "error[<tag>]: <message>".
class Error : public std::runtime_error {
 public:
  Error(std::string tag, const std::string& message)
      : std::runtime_error(message), tag_(std::move(tag)) {}

  const std::string& tag() const { return tag_; }

 private:
  std::string tag_;
};

#define SPECLHS_DEFINE_ERROR(name)                        \
  class name : public Error {                             \
   public:                                                \
    explicit name(const std::string& message)             \
        : Error(#name, message) {}                        \
  }

SPECLHS_DEFINE_ERROR(UnreadableFile);
SPECLHS_DEFINE_ERROR(GridMismatch);
SPECLHS_DEFINE_ERROR(EmptyAfterMask);
SPECLHS_DEFINE_ERROR(AllColumnsDegenerate);
SPECLHS_DEFINE_ERROR(IsolatedNode);
SPECLHS_DEFINE_ERROR(EigenFailure);
SPECLHS_DEFINE_ERROR(SingleCluster);
SPECLHS_DEFINE_ERROR(BudgetExceedsCandidates);
SPECLHS_DEFINE_ERROR(BudgetTooSmall);
SPECLHS_DEFINE_ERROR(InfeasibleBudget);
SPECLHS_DEFINE_ERROR(OverrideInfeasible);
SPECLHS_DEFINE_ERROR(MismatchedContext);
SPECLHS_DEFINE_ERROR(MissingClusterModel);
SPECLHS_DEFINE_ERROR(MissingDesign);
SPECLHS_DEFINE_ERROR(FileWriteError);
SPECLHS_DEFINE_ERROR(InvalidConfig);
SPECLHS_DEFINE_ERROR(InvalidArgument);

#undef SPECLHS_DEFINE_ERROR

}  // namespace speclhs
