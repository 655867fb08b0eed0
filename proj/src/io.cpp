#include "znwrap/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "znwrap/report.hpp"

namespace znwrap {

namespace {

using njson = nlohmann::json;

njson parse_or_invalid(const std::string& text, const char* what) {
    try {
        return njson::parse(text);
    } catch (const njson::exception& e) {
        throw std::invalid_argument(std::string(what) + ": " + e.what());
    }
}

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::invalid_argument("set JSON: bad hex digit in bits_hex");
}

}  // namespace

std::string set_to_json(const GroupSet& s) {
    const std::uint64_t n = s.modulus();
    std::ostringstream out;
    out << "{\"N\":" << n << ',';
    if (n <= 4096) {
        out << "\"residues\":[";
        bool first = true;
        for (std::uint64_t x : s.residues()) {
            if (!first) out << ',';
            first = false;
            out << x;
        }
        out << "]}";
        return out.str();
    }
    // Little-endian bit string: byte j holds residues 8j..8j+7, bit k of
    // the byte is residue 8j + k.
    out << "\"bits_hex\":\"";
    const std::uint64_t bytes = (n + 7) / 8;
    const auto& words = s.words();
    static const char* digits = "0123456789abcdef";
    for (std::uint64_t j = 0; j < bytes; ++j) {
        const unsigned byte =
            static_cast<unsigned>((words[j >> 3] >> (8 * (j & 7))) & 0xffu);
        out << digits[byte >> 4] << digits[byte & 0xf];
    }
    out << "\"}";
    return out.str();
}

GroupSet set_from_json(const std::string& text) {
    const njson j = parse_or_invalid(text, "set JSON");
    if (!j.is_object() || !j.contains("N")) {
        throw std::invalid_argument("set JSON: expected an object with \"N\"");
    }
    const std::uint64_t n = j.at("N").get<std::uint64_t>();
    if (j.contains("residues")) {
        std::vector<std::uint64_t> xs;
        for (const auto& e : j.at("residues")) {
            xs.push_back(e.get<std::uint64_t>());
        }
        return GroupSet::from_residues(xs, n);
    }
    if (!j.contains("bits_hex")) {
        throw std::invalid_argument("set JSON: need \"residues\" or \"bits_hex\"");
    }
    const std::string hex = j.at("bits_hex").get<std::string>();
    const std::uint64_t bytes = (n + 7) / 8;
    require_arg(hex.size() == 2 * bytes, "set JSON: bits_hex has the wrong length");
    std::vector<std::uint64_t> words((n + 63) / 64, 0);
    for (std::uint64_t j2 = 0; j2 < bytes; ++j2) {
        const std::uint64_t byte = static_cast<std::uint64_t>(
            hex_digit(hex[2 * j2]) * 16 + hex_digit(hex[2 * j2 + 1]));
        words[j2 >> 3] |= byte << (8 * (j2 & 7));
    }
    // Reject stray bits at residues >= N instead of silently masking them.
    if (n % 64 != 0) {
        const std::uint64_t tail = words.back() & ~((1ULL << (n % 64)) - 1);
        require_arg(tail == 0, "set JSON: bits set beyond N");
    }
    return GroupSet::from_words(CyclicGroup(n), std::move(words));
}

GroupSet load_set_spec(const std::string& spec) {
    require_arg(!spec.empty(), "set spec: empty");
    if (spec.front() == '{') return set_from_json(spec);

    const auto colon = spec.find(':');
    const bool inline_list =
        colon != std::string::npos && colon > 0 &&
        spec.find_first_not_of("0123456789", 0) == colon;
    if (inline_list) {
        const std::uint64_t n = std::stoull(spec.substr(0, colon));
        std::vector<std::uint64_t> xs;
        std::stringstream rest(spec.substr(colon + 1));
        std::string tok;
        while (std::getline(rest, tok, ',')) {
            if (tok.empty()) continue;
            require_arg(tok.find_first_not_of("0123456789") == std::string::npos,
                        "set spec: residues must be decimal");
            xs.push_back(std::stoull(tok));
        }
        return GroupSet::from_residues(xs, n);
    }

    std::ifstream in(spec);
    require_arg(in.good(), "set spec: cannot open file " + spec);
    std::ostringstream buf;
    buf << in.rdbuf();
    return set_from_json(buf.str());
}

std::string wrapper_to_json(const Wrapper& w) {
    const BlockPartition& part = w.partition();
    const CharacterFamily& fam = part.family();
    std::ostringstream out;
    out << "{\"K\":" << part.arcs().arc_count;
    out << ",\"N\":" << part.group_order();
    out << ",\"characters\":[";
    for (std::size_t j = 0; j < fam.dim(); ++j) {
        if (j) out << ',';
        out << fam.characters[j];
    }
    out << "],\"coefficients\":[";
    for (std::size_t j = 0; j < fam.dim(); ++j) {
        if (j) out << ',';
        out << "{\"im\":" << format_double(fam.coefficients[j].imag())
            << ",\"re\":" << format_double(fam.coefficients[j].real()) << '}';
    }
    out << "],\"epsilon\":" << format_double(part.arcs().epsilon);
    out << ",\"signatures\":[";
    bool first = true;
    for (std::uint32_t b = 0; b < part.block_count(); ++b) {
        if (!w.selected()[b]) continue;
        if (!first) out << ',';
        first = false;
        out << '[';
        const BlockSignature sig = part.signature(b);
        for (std::size_t j = 0; j < sig.size(); ++j) {
            if (j) out << ',';
            out << sig[j];
        }
        out << ']';
    }
    out << "]}";
    return out.str();
}

Wrapper wrapper_from_json(const std::string& text) {
    const njson j = parse_or_invalid(text, "wrapper JSON");
    const std::uint64_t n = j.at("N").get<std::uint64_t>();
    const std::uint64_t k = j.at("K").get<std::uint64_t>();
    const double eps = j.at("epsilon").get<double>();
    require_arg(k >= 1, "wrapper JSON: K must be >= 1");
    require_arg(eps > 0, "wrapper JSON: epsilon must be > 0");

    CharacterFamily fam{CyclicGroup(n), {}, {}};
    for (const auto& e : j.at("characters")) {
        const std::uint64_t r = e.get<std::uint64_t>();
        require_arg(r < n, "wrapper JSON: character out of range");
        fam.characters.push_back(r);
    }
    for (const auto& e : j.at("coefficients")) {
        const cd c(e.at("re").get<double>(), e.at("im").get<double>());
        require_arg(std::abs(std::abs(c) - 1.0) < 1e-6,
                    "wrapper JSON: coefficients must be unimodular");
        fam.coefficients.push_back(c);
    }
    require_arg(fam.characters.size() == fam.coefficients.size(),
                "wrapper JSON: characters/coefficients mismatch");
    const std::size_t d = fam.dim();

    std::set<BlockSignature> sigs;
    for (const auto& e : j.at("signatures")) {
        BlockSignature sig;
        for (const auto& v : e) {
            const std::uint64_t i = v.get<std::uint64_t>();
            require_arg(i >= 1 && i <= k, "wrapper JSON: arc index out of range");
            sig.push_back(i);
        }
        require_arg(sig.size() == d, "wrapper JSON: signature length != d");
        sigs.insert(std::move(sig));
    }

    auto part = std::make_shared<const BlockPartition>(std::move(fam),
                                                       ArcPartition{eps, k});
    std::vector<char> selected(part->block_count(), 0);
    for (std::uint32_t b = 0; b < part->block_count(); ++b) {
        selected[b] = sigs.count(part->signature(b)) ? 1 : 0;
    }
    return Wrapper(std::move(part), std::move(selected));
}

}  // namespace znwrap
