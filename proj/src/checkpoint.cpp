#include "itpnet/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <map>

#include <zlib.h>

namespace itpnet {

namespace {

constexpr std::uint32_t kVersion = 1;

void wr_u32(std::string& out, std::uint32_t v) {
    char b[4];
    std::memcpy(b, &v, 4);
    out.append(b, 4);
}

void wr_u64(std::string& out, std::uint64_t v) {
    char b[8];
    std::memcpy(b, &v, 8);
    out.append(b, 8);
}

void wr_tensor(std::string& out, const std::string& name, const Tensor& t) {
    wr_u32(out, std::uint32_t(name.size()));
    out.append(name);
    wr_u32(out, 2);
    wr_u64(out, t.rows());
    wr_u64(out, t.cols());
    out.append(reinterpret_cast<const char*>(t.data()), t.size() * sizeof(double));
}

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > buf.size()) throw DataError("checkpoint truncated");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v;
        std::memcpy(&v, buf.data() + pos, 4);
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v;
        std::memcpy(&v, buf.data() + pos, 8);
        pos += 8;
        return v;
    }
    std::string bytes(std::size_t n) {
        need(n);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
};

} // namespace

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
    const ParamStore& ps = ck.model.params();
    std::string out;
    out.append("ITPN", 4);
    wr_u32(out, kVersion);
    const std::string cfg = ck.model.config().canonical_json();
    wr_u64(out, cfg.size());
    out.append(cfg);

    const bool with_opt = ck.opt.m.size() == ps.size();
    std::uint64_t records = ps.size() + (with_opt ? 2 * ps.size() : 0) + 2;
    wr_u64(out, records);
    for (std::size_t i = 0; i < ps.size(); ++i) wr_tensor(out, ps.name(i), ps.at(i));
    if (with_opt)
        for (std::size_t i = 0; i < ps.size(); ++i) {
            wr_tensor(out, "adam.m." + ps.name(i), ck.opt.m[i]);
            wr_tensor(out, "adam.v." + ps.name(i), ck.opt.v[i]);
        }
    wr_tensor(out, "meta.step", Tensor::scalar(double(ck.step)));
    wr_tensor(out, "meta.adam_t", Tensor::scalar(double(ck.opt.step_count)));

    wr_u32(out, std::uint32_t(crc32(0, reinterpret_cast<const Bytef*>(out.data()),
                                    uInt(out.size()))));

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write checkpoint: " + path);
    f.write(out.data(), std::streamsize(out.size()));
    if (!f) throw DataError("short write: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot read checkpoint: " + path);
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    Reader r{buf};
    if (r.bytes(4) != "ITPN") throw DataError("not a checkpoint file (bad magic): " + path);
    const std::uint32_t version = r.u32();
    if (version != kVersion)
        throw DataError("unsupported checkpoint version " + std::to_string(version));

    const std::uint64_t cfg_len = r.u64();
    const std::string cfg_json = r.bytes(cfg_len);
    const std::uint64_t records = r.u64();
    std::map<std::string, Tensor> named;
    for (std::uint64_t i = 0; i < records; ++i) {
        const std::uint32_t name_len = r.u32();
        const std::string name = r.bytes(name_len);
        const std::uint32_t rank = r.u32();
        if (rank != 2) throw DataError("checkpoint record " + name + ": unsupported rank");
        const std::uint64_t rows = r.u64();
        const std::uint64_t cols = r.u64();
        const std::uint64_t cap = std::uint64_t(1) << 28;
        if (rows > cap || cols > cap || rows * cols > cap)
            throw DataError("checkpoint record " + name + ": implausible size");
        Tensor t(rows, cols);
        r.need(t.size() * sizeof(double));
        std::memcpy(t.data(), buf.data() + r.pos, t.size() * sizeof(double));
        r.pos += t.size() * sizeof(double);
        if (named.count(name)) throw DataError("checkpoint record " + name + ": duplicate");
        named.emplace(name, std::move(t));
    }
    const std::size_t body = r.pos;
    const std::uint32_t stored = r.u32();
    if (r.pos != buf.size()) throw DataError("checkpoint has trailing bytes: " + path);
    const std::uint32_t actual =
        std::uint32_t(crc32(0, reinterpret_cast<const Bytef*>(buf.data()), uInt(body)));
    if (stored != actual) throw DataError("checkpoint checksum mismatch: " + path);

    Checkpoint ck;
    TrainConfig cfg = parse_cli_config(cfg_json).train;
    ck.model = Model::init(cfg);
    ParamStore& ps = ck.model.params();
    ck.opt.lr = cfg.lr;
    ck.opt.init(ps);

    const auto take = [&](const std::string& name, Tensor& dst) {
        auto it = named.find(name);
        if (it == named.end()) throw DataError("checkpoint is missing tensor " + name);
        if (!it->second.same_shape(dst))
            throw DataError("checkpoint tensor " + name + " has the wrong shape");
        dst = std::move(it->second);
        named.erase(it);
    };
    for (std::size_t i = 0; i < ps.size(); ++i) take(ps.name(i), ps.at(i));
    if (named.count("adam.m." + ps.name(0)))
        for (std::size_t i = 0; i < ps.size(); ++i) {
            take("adam.m." + ps.name(i), ck.opt.m[i]);
            take("adam.v." + ps.name(i), ck.opt.v[i]);
        }
    Tensor step_t(1, 1), adam_t(1, 1);
    take("meta.step", step_t);
    take("meta.adam_t", adam_t);
    ck.step = long(step_t.item());
    ck.opt.step_count = long(adam_t.item());
    if (!named.empty())
        throw DataError("checkpoint holds unexpected tensor " + named.begin()->first);
    return ck;
}

void require_compatible(const TrainConfig& have, const TrainConfig& want) {
    const auto fail = [](const char* field) {
        throw ConfigError(std::string("checkpoint incompatible with requested config: ") + field);
    };
    if (have.T != want.T) fail("T");
    if (have.N != want.N) fail("N");
    if (have.M != want.M) fail("M");
    if (have.K != want.K) fail("K");
    if (have.C != want.C) fail("C");
    if (have.L != want.L) fail("L");
    if (have.d != want.d) fail("d");
    if (have.heads != want.heads) fail("heads");
    if (have.loss_family != want.loss_family) fail("loss_family");
    if (have.nrrformer != want.nrrformer) fail("nrrformer");
    if (have.activation != want.activation) fail("activation");
    if (have.positional_encoding != want.positional_encoding) fail("positional_encoding");
}

} // namespace itpnet
