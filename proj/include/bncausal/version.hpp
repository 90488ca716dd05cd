#ifndef BNCAUSAL_VERSION_HPP_
#define BNCAUSAL_VERSION_HPP_

namespace bncausal {

// Serialized model format tag. Bump only with a migration path.
inline constexpr const char* kModelFormatVersion = "bn-causal/1";

}  // namespace bncausal

#endif  // BNCAUSAL_VERSION_HPP_
