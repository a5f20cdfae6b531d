#include <sstream>
#include <vector>

#include "soalens/emit.hpp"

namespace soalens {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

enum class Op : std::uint8_t { Keep, Del, Add };

struct Edit {
    Op op;
    std::size_t a;  // line index in before (Keep/Del)
    std::size_t b;  // line index in after (Keep/Add)
};

// Longest-common-subsequence edit script.
std::vector<Edit> edit_script(const std::vector<std::string>& x, const std::vector<std::string>& y) {
    const std::size_t n = x.size(), m = y.size();
    std::vector<std::vector<std::uint32_t>> lcs(n + 1, std::vector<std::uint32_t>(m + 1, 0));
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t j = m; j-- > 0;)
            lcs[i][j] = x[i] == y[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);
    std::vector<Edit> out;
    std::size_t i = 0, j = 0;
    while (i < n || j < m) {
        if (i < n && j < m && x[i] == y[j]) {
            out.push_back({Op::Keep, i++, j++});
        } else if (i < n && (j == m || lcs[i + 1][j] >= lcs[i][j + 1])) {
            out.push_back({Op::Del, i++, j});
        } else {
            out.push_back({Op::Add, i, j++});
        }
    }
    return out;
}

}  // namespace

std::string diff_report(const std::string& before, const std::string& after, const std::string& before_label,
                        const std::string& after_label) {
    constexpr std::size_t kContext = 3;
    auto x = split_lines(before);
    auto y = split_lines(after);
    auto edits = edit_script(x, y);

    std::ostringstream os;
    std::size_t k = 0;
    bool header = false;
    while (k < edits.size()) {
        while (k < edits.size() && edits[k].op == Op::Keep) ++k;
        if (k == edits.size()) break;
        std::size_t first = k >= kContext ? k - kContext : 0;
        std::size_t last = k;  // one past the hunk
        // extend over changes separated by at most 2*context kept lines
        while (last < edits.size()) {
            if (edits[last].op != Op::Keep) {
                ++last;
                continue;
            }
            std::size_t run = last;
            while (run < edits.size() && edits[run].op == Op::Keep) ++run;
            if (run == edits.size() || run - last > 2 * kContext) {
                last = std::min(run, last + kContext);
                break;
            }
            last = run;
        }

        std::size_t a_start = edits[first].a, b_start = edits[first].b, a_len = 0, b_len = 0;
        for (std::size_t e = first; e < last; ++e) {
            if (edits[e].op != Op::Add) ++a_len;
            if (edits[e].op != Op::Del) ++b_len;
        }
        if (!header) {
            os << "--- " << before_label << "\n+++ " << after_label << '\n';
            header = true;
        }
        os << "@@ -" << (a_len ? a_start + 1 : a_start) << ',' << a_len << " +" << (b_len ? b_start + 1 : b_start)
           << ',' << b_len << " @@\n";
        for (std::size_t e = first; e < last; ++e) {
            switch (edits[e].op) {
                case Op::Keep: os << ' ' << x[edits[e].a] << '\n'; break;
                case Op::Del: os << '-' << x[edits[e].a] << '\n'; break;
                case Op::Add: os << '+' << y[edits[e].b] << '\n'; break;
            }
        }
        k = last;
    }
    return os.str();
}

}  // namespace soalens
