#ifndef ARW_CSV_HPP
#define ARW_CSV_HPP

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace arw {
namespace csv {

// Full-precision decimal rendering (17 significant digits) so values
// round-trip through text losslessly.
inline std::string format(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string format(std::int64_t v) { return std::to_string(v); }
inline std::string format(std::uint64_t v) { return std::to_string(v); }
inline std::string format(int v) { return std::to_string(v); }
inline std::string format(const std::string& v) { return v; }
inline std::string format(const char* v) { return v; }

class Writer {
  public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void comment(const std::string& text) { out_ << "# " << text << "\n"; }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ",";
            out_ << cells[i];
        }
        out_ << "\n";
    }

    template <typename... Ts>
    void cells(const Ts&... vs) {
        row({format(vs)...});
    }

  private:
    std::ostream& out_;
};

}  // namespace csv
}  // namespace arw

#endif
