/** Fire-and-forget UDP sender: one wire line per datagram, no delivery guarantees. */

import dgram from "node:dgram";

export interface Emitter {
  send(line: string): void;
  close(): void;
  readonly sent: number;
}

export class UdpEmitter implements Emitter {
  private socket: dgram.Socket;
  sent = 0;

  constructor(
    readonly host: string,
    readonly port: number,
  ) {
    this.socket = dgram.createSocket("udp4");
    this.socket.on("error", (err) => {
      // fire-and-forget: log and keep going, the pose stream is lossy anyway
      console.error(`udp emitter error: ${err.message}`);
    });
  }

  send(line: string): void {
    this.socket.send(Buffer.from(line, "utf8"), this.port, this.host);
    this.sent++;
  }

  close(): void {
    this.socket.close();
  }
}

/** Collects lines in memory; used by tests and dry runs. */
export class CollectingEmitter implements Emitter {
  lines: string[] = [];

  get sent(): number {
    return this.lines.length;
  }

  send(line: string): void {
    this.lines.push(line);
  }

  close(): void {}
}

/** Parse "udp:HOST:PORT" or "udp:PORT" (host defaults to 127.0.0.1). */
export function parseEndpoint(spec: string): { host: string; port: number } {
  const parts = spec.split(":");
  if (parts[0] !== "udp" || parts.length < 2 || parts.length > 3) {
    throw new Error(`endpoint must be udp:HOST:PORT or udp:PORT, got ${spec}`);
  }
  const host = parts.length === 3 ? parts[1] : "127.0.0.1";
  const port = Number(parts[parts.length - 1]);
  if (!Number.isInteger(port) || port < 0 || port > 65535) {
    throw new Error(`bad UDP port in ${spec}`);
  }
  return { host, port };
}
