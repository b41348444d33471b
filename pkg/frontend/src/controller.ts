import { ApiError, RawSnapshot, SteeringApi } from "./api.js";
import { RunHistory } from "./history.js";
import { DashboardModel, dashboardModel } from "./readout.js";
import { Command, CreateSessionRequest } from "./schema.js";

export type ConsoleState = {
  sessionId: string | null;
  model: DashboardModel | null;
  /** Set when a command bounced with 409: another client (or tab) holds
   *  the session, so what we show may be stale until refreshed. */
  staleBanner: string | null;
  lastError: string | null;
};

/** Drives one session: every action round-trips through the service and
 *  re-renders from the authoritative snapshot that comes back. */
export class SessionController {
  readonly history = new RunHistory();
  private state: ConsoleState = {
    sessionId: null,
    model: null,
    staleBanner: null,
    lastError: null,
  };
  private lastRaw: RawSnapshot | null = null;

  constructor(
    private readonly api: SteeringApi,
    private readonly onChange: (state: ConsoleState) => void = () => {},
  ) {}

  current(): ConsoleState {
    return this.state;
  }

  /** Raw JSON text of the last snapshot, for export and byte checks. */
  rawSnapshotText(): string | null {
    return this.lastRaw ? this.lastRaw.raw : null;
  }

  private accept(rs: RawSnapshot): void {
    this.lastRaw = rs;
    this.history.record(rs.snapshot);
    this.state = {
      ...this.state,
      model: dashboardModel(rs),
      staleBanner: null,
      lastError: null,
    };
    this.onChange(this.state);
  }

  private fail(err: unknown): never {
    if (err instanceof ApiError && err.status === 409) {
      this.state = { ...this.state, staleBanner: err.detail };
    } else {
      this.state = {
        ...this.state,
        lastError: err instanceof Error ? err.message : String(err),
      };
    }
    this.onChange(this.state);
    throw err;
  }

  async open(spec: CreateSessionRequest): Promise<void> {
    const { id, first } = await this.api.createSession(spec);
    this.history.clear();
    this.state = { sessionId: id, model: null, staleBanner: null, lastError: null };
    this.accept(first);
  }

  async refresh(): Promise<void> {
    const id = this.requireSession();
    this.accept(await this.api.snapshot(id));
  }

  async apply(cmd: Command): Promise<DashboardModel> {
    const id = this.requireSession();
    try {
      this.accept(await this.api.command(id, cmd));
    } catch (err) {
      this.fail(err);
    }
    return this.state.model!;
  }

  expand(levels = 1): Promise<DashboardModel> {
    return this.apply({ op: "expand", levels });
  }

  optimize(): Promise<DashboardModel> {
    return this.apply({ op: "optimize" });
  }

  setTarget(target: number): Promise<DashboardModel> {
    return this.apply({ op: "set_target", target });
  }

  checkpoint(): Promise<DashboardModel> {
    return this.apply({ op: "checkpoint" });
  }

  rollback(id: number): Promise<DashboardModel> {
    return this.apply({ op: "rollback", id });
  }

  stop(): Promise<DashboardModel> {
    return this.apply({ op: "stop" });
  }

  /** Run export: the authoritative snapshot bytes plus console context. */
  exportRun(): string {
    const raw = this.rawSnapshotText();
    if (raw === null) throw new Error("nothing to export yet");
    return (
      '{"session":' +
      JSON.stringify(this.state.sessionId) +
      ',"snapshot":' +
      raw.trim() +
      ',"history":' +
      JSON.stringify(this.history.series()) +
      "}"
    );
  }

  private requireSession(): string {
    if (this.state.sessionId === null) {
      throw new Error("no session open");
    }
    return this.state.sessionId;
  }
}
