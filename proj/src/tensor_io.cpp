#include "rtpca/tensor_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace rtpca {

Tensor3 read_tensor(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw ParseError("read_tensor", "missing header line");
    std::istringstream hs(header);
    long long n1 = -1, n2 = -1, n3 = -1;
    if (!(hs >> n1 >> n2 >> n3) || n1 < 0 || n2 < 0 || n3 < 0)
        throw ParseError("read_tensor", "header must be three non-negative integers");
    std::string extra;
    if (hs >> extra) throw ParseError("read_tensor", "trailing text in header: " + extra);

    const Dims dims{n1, n2, n3};
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(dims.size()));
    std::string token;
    while (in >> token) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(token, &used);
        } catch (const std::exception&) {
            throw ParseError("read_tensor", "not a number: " + token);
        }
        if (used != token.size()) throw ParseError("read_tensor", "not a number: " + token);
        values.push_back(v);
    }
    if (static_cast<Index>(values.size()) != dims.size())
        throw ParseError("read_tensor", "expected " + std::to_string(dims.size()) +
                                            " values, found " + std::to_string(values.size()));
    return Tensor3(dims, std::move(values));
}

void write_tensor(std::ostream& out, const Tensor3& t) {
    const Dims d = t.dims();
    out << d.n1 << ' ' << d.n2 << ' ' << d.n3 << '\n';
    char buf[64];
    for (Index i = 0; i < d.n1; ++i) {
        for (Index j = 0; j < d.n2; ++j) {
            for (Index k = 0; k < d.n3; ++k) {
                std::snprintf(buf, sizeof buf, "%.17g", t(i, j, k));
                if (k) out << ' ';
                out << buf;
            }
            out << '\n';
        }
    }
}

Tensor3 read_tensor_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("read_tensor", "cannot open " + path.string());
    return read_tensor(in);
}

void write_tensor_file(const std::filesystem::path& path, const Tensor3& t) {
    std::ofstream out(path);
    if (!out) throw ParseError("write_tensor", "cannot open " + path.string());
    write_tensor(out, t);
    if (!out) throw ParseError("write_tensor", "write failed for " + path.string());
}

} // namespace rtpca
