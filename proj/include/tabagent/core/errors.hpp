#pragma once

#include <stdexcept>
#include <string>

namespace tabagent {

// Base for every error the library raises. Violations reported as data
// (validate_group, Malformed parses, failed executions) are not errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define TABAGENT_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what) : Error(#Name ": " + what) \
    {}                                                                \
  }

TABAGENT_DEFINE_ERROR(EmptyTrajectory);
TABAGENT_DEFINE_ERROR(GroupTooSmall);
TABAGENT_DEFINE_ERROR(AlignmentError);
TABAGENT_DEFINE_ERROR(NonFiniteGradient);
TABAGENT_DEFINE_ERROR(MissingReward);
TABAGENT_DEFINE_ERROR(TableTooLarge);
TABAGENT_DEFINE_ERROR(BackendUnavailable);
TABAGENT_DEFINE_ERROR(ExecutorUnavailable);
TABAGENT_DEFINE_ERROR(UnknownTaskId);
TABAGENT_DEFINE_ERROR(SchemaMismatch);
TABAGENT_DEFINE_ERROR(FormatError);
TABAGENT_DEFINE_ERROR(ConfigError);
TABAGENT_DEFINE_ERROR(TrainingDiverged);

#undef TABAGENT_DEFINE_ERROR

}  // namespace tabagent
