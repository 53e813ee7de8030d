#include "ptcav/model.hpp"

#include <sstream>

#include "ptcav/io.hpp"

namespace ptcav {

namespace {
constexpr const char* kKeys[] = {"omega0", "gamma0", "g0", "f0", "kappa", "gamma1", "gamma2"};

double* field(Params& p, std::string_view key) {
    if (key == "omega0") return &p.omega0;
    if (key == "gamma0") return &p.gamma0;
    if (key == "g0") return &p.g0;
    if (key == "f0") return &p.f0;
    if (key == "kappa") return &p.kappa;
    if (key == "gamma1") return &p.gamma1;
    if (key == "gamma2") return &p.gamma2;
    return nullptr;
}
} // namespace

std::map<std::string, double> to_key_values(const Params& p) {
    Params copy = p;
    std::map<std::string, double> kv;
    for (const char* key : kKeys)
        kv[key] = *field(copy, key);
    return kv;
}

Params params_from_key_values(const std::map<std::string, double>& kv) {
    Params p;
    for (const auto& [key, value] : kv) {
        double* slot = field(p, key);
        if (!slot)
            throw Error(ErrorKind::Parse, "unknown parameter key '" + key + "'");
        *slot = value;
    }
    validate(p);
    return p;
}

std::string format_params(const Params& p) {
    Params copy = p;
    std::ostringstream os;
    for (const char* key : kKeys)
        os << key << " = " << format_number(*field(copy, key)) << '\n';
    return os.str();
}

} // namespace ptcav
