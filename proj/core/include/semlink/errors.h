#ifndef SEMLINK_ERRORS_H_
#define SEMLINK_ERRORS_H_

#include <stdexcept>
#include <string>

namespace semlink {

// Coarse failure classes. The CLI maps them onto exit codes.
enum class ErrorClass { kUsage, kData, kCapacity };

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what,
                 ErrorClass error_class = ErrorClass::kData)
      : std::runtime_error(what), error_class_(error_class) {}

  ErrorClass error_class() const { return error_class_; }

 private:
  ErrorClass error_class_;
};

#define SEMLINK_DEFINE_ERROR(Name)                               \
  class Name : public Error {                                    \
   public:                                                       \
    explicit Name(const std::string &what) : Error(what) {}      \
  }

// Embedding files.
SEMLINK_DEFINE_ERROR(FormatError);
SEMLINK_DEFINE_ERROR(TruncatedError);
SEMLINK_DEFINE_ERROR(DuplicateLabelError);
SEMLINK_DEFINE_ERROR(ValueError);
SEMLINK_DEFINE_ERROR(IoError);

// Dictionary and type extraction.
SEMLINK_DEFINE_ERROR(MissingSeedError);
SEMLINK_DEFINE_ERROR(RemapTargetError);
SEMLINK_DEFINE_ERROR(DuplicateEntityError);

// Vector arithmetic.
SEMLINK_DEFINE_ERROR(MissingWordVectorError);
SEMLINK_DEFINE_ERROR(DimensionError);
SEMLINK_DEFINE_ERROR(MissingLabelError);

// Linking.
SEMLINK_DEFINE_ERROR(InvalidDocumentError);
SEMLINK_DEFINE_ERROR(RelationArityError);
SEMLINK_DEFINE_ERROR(EmptyTrainingError);

// Evaluation.
SEMLINK_DEFINE_ERROR(AlignmentError);

#undef SEMLINK_DEFINE_ERROR

class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string &what)
      : Error(what, ErrorClass::kCapacity) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string &what)
      : Error(what, ErrorClass::kUsage) {}
};

}  // namespace semlink

#endif  // SEMLINK_ERRORS_H_
