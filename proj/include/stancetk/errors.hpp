#ifndef STANCETK_ERRORS_HPP
#define STANCETK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace stancetk {

// Contract errors carry a stable name; the CLI prints it and maps every
// Error to exit code 2.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(name + ": " + what), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define STANCETK_ERROR(NAME)                          \
    class NAME : public Error {                       \
    public:                                           \
        explicit NAME(const std::string& what)        \
            : Error(#NAME, what) {}                   \
    };

STANCETK_ERROR(MalformedRecord)
STANCETK_ERROR(MissingField)
STANCETK_ERROR(LabeledUserWithoutTweets)
STANCETK_ERROR(InsufficientUsers)
STANCETK_ERROR(InvalidConfig)
STANCETK_ERROR(NoSeedOccurrences)
STANCETK_ERROR(BothEmpty)
STANCETK_ERROR(TokenAbsentFromCorpus)
STANCETK_ERROR(EmptyDictionary)
STANCETK_ERROR(SingleClassInput)
STANCETK_ERROR(DimensionMismatch)
STANCETK_ERROR(TooFewInstances)
STANCETK_ERROR(EmptyMatrix)
STANCETK_ERROR(IoError)

#undef STANCETK_ERROR

} // namespace stancetk

#endif // STANCETK_ERRORS_HPP
