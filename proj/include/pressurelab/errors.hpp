#pragma once

#include <stdexcept>
#include <string>

namespace pressurelab {

// Base for every library failure. The `module` and `operation` tags feed the
// CLI's machine-readable error records.
class Error : public std::runtime_error {
public:
    Error(std::string module, std::string operation, const std::string& what)
        : std::runtime_error(what),
          module_(std::move(module)),
          operation_(std::move(operation)) {}

    const std::string& module() const noexcept { return module_; }
    const std::string& operation() const noexcept { return operation_; }
    virtual const char* kind() const noexcept { return "Error"; }

private:
    std::string module_;
    std::string operation_;
};

#define PRESSURELAB_DEFINE_ERROR(Name)                                        \
    class Name : public Error {                                               \
    public:                                                                    \
        using Error::Error;                                                    \
        const char* kind() const noexcept override { return #Name; }          \
    }

PRESSURELAB_DEFINE_ERROR(AlphabetError);
PRESSURELAB_DEFINE_ERROR(RangeError);
PRESSURELAB_DEFINE_ERROR(OverlapError);
PRESSURELAB_DEFINE_ERROR(DepthError);
PRESSURELAB_DEFINE_ERROR(ConvergenceError);
PRESSURELAB_DEFINE_ERROR(BudgetError);
PRESSURELAB_DEFINE_ERROR(WidthError);
PRESSURELAB_DEFINE_ERROR(RegimeError);
PRESSURELAB_DEFINE_ERROR(BoundaryDepthError);
PRESSURELAB_DEFINE_ERROR(SingularJacobianError);
PRESSURELAB_DEFINE_ERROR(EscapeFromRepellerError);
PRESSURELAB_DEFINE_ERROR(PrecisionError);

#undef PRESSURELAB_DEFINE_ERROR

}  // namespace pressurelab
