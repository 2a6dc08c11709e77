#include "sysflow/ingest/syscall_map.hpp"

#include <stdexcept>
#include <string>

namespace sysflow::ingest {

OpTarget base_operation(Syscall s) {
  using K = RecordKind;
  switch (normalize(s)) {
    case Syscall::clone: return {K::ProcessEvent, Op::Clone};
    case Syscall::execve: return {K::ProcessEvent, Op::Exec};
    case Syscall::exit: return {K::ProcessEvent, Op::Exit};
    case Syscall::setuid: return {K::ProcessEvent, Op::Setuid};
    case Syscall::setgid: return {K::ProcessEvent, Op::Setgid};
    case Syscall::open: return {K::FileFlow, Op::Open};
    case Syscall::read: return {K::FileFlow, Op::Read};
    case Syscall::write: return {K::FileFlow, Op::Write};
    case Syscall::close: return {K::FileFlow, Op::Close};
    case Syscall::mmap: return {K::FileFlow, Op::Mmap};
    case Syscall::setns: return {K::FileFlow, Op::Setns};
    case Syscall::mkdir: return {K::FileEvent, Op::Mkdir};
    case Syscall::rmdir: return {K::FileEvent, Op::Rmdir};
    case Syscall::unlink: return {K::FileEvent, Op::Unlink};
    case Syscall::symlink: return {K::FileEvent, Op::Symlink};
    case Syscall::link: return {K::FileEvent, Op::Link};
    case Syscall::rename: return {K::FileEvent, Op::Rename};
    case Syscall::chmod: return {K::FileEvent, Op::Chmod};
    case Syscall::chown: return {K::FileEvent, Op::Chown};
    case Syscall::mount: return {K::FileEvent, Op::Mount};
    case Syscall::umount: return {K::FileEvent, Op::Umount};
    case Syscall::bind: return {K::NetworkEvent, Op::Bind};
    case Syscall::listen: return {K::NetworkEvent, Op::Listen};
    case Syscall::accept: return {K::NetworkFlow, Op::Accept};
    case Syscall::connect: return {K::NetworkFlow, Op::Connect};
    case Syscall::send: return {K::NetworkFlow, Op::Send};
    case Syscall::recv: return {K::NetworkFlow, Op::Recv};
    case Syscall::shutdown: return {K::NetworkFlow, Op::Shutdown};
    case Syscall::openat:
    case Syscall::sendto:
    case Syscall::recvfrom:
      break;  // normalized away above
  }
  throw std::logic_error("unmapped syscall");
}

OrphanFdError::OrphanFdError(std::uint32_t pid, std::int32_t fd)
    : Error("pid " + std::to_string(pid) + " uses fd " + std::to_string(fd) +
            " which was never opened"),
      pid_(pid),
      fd_(fd) {}

void FdRegistry::bind(std::uint32_t pid, std::int32_t fd, FdResource res) {
  fds_[{pid, fd}] = std::move(res);
}

const FdResource* FdRegistry::find(std::uint32_t pid, std::int32_t fd) const {
  auto it = fds_.find({pid, fd});
  return it == fds_.end() ? nullptr : &it->second;
}

bool FdRegistry::release(std::uint32_t pid, std::int32_t fd) { return fds_.erase({pid, fd}) > 0; }

void FdRegistry::release_process(std::uint32_t pid) {
  auto it = fds_.lower_bound({pid, INT32_MIN});
  while (it != fds_.end() && it->first.first == pid) it = fds_.erase(it);
}

OpTarget syscall_to_op(const RawEvent& ev, const FdRegistry& registry) {
  const Syscall s = normalize(ev.syscall);
  switch (s) {
    case Syscall::clone:
      return ev.thread_flag ? OpTarget{RecordKind::ProcessFlow, Op::Clone}
                            : OpTarget{RecordKind::ProcessEvent, Op::Clone};
    case Syscall::exit:
      return ev.tid == ev.pid ? OpTarget{RecordKind::ProcessEvent, Op::Exit}
                              : OpTarget{RecordKind::ProcessFlow, Op::Exit};
    case Syscall::close:
    case Syscall::read:
    case Syscall::write: {
      const FdResource* res = ev.fd ? registry.find(ev.pid, *ev.fd) : nullptr;
      if (res == nullptr) throw OrphanFdError(ev.pid, ev.fd.value_or(-1));
      if (std::holds_alternative<SocketHandle>(*res)) {
        const Op op = s == Syscall::close ? Op::Close : s == Syscall::read ? Op::Recv : Op::Send;
        return {RecordKind::NetworkFlow, op};
      }
      return base_operation(s);
    }
    default:
      return base_operation(s);
  }
}

}  // namespace sysflow::ingest
