// Fixed-interval polling loop. A failing poll flips the degraded flag and
// polling continues; a 401 is surfaced separately so the UI can show the
// authentication banner instead of the alert list.

export interface PollStatus {
  degraded: boolean;
  authFailed: boolean;
  lastError?: string;
}

export class PollController {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private running = false;
  readonly status: PollStatus = { degraded: false, authFailed: false };

  constructor(
    private readonly tick: () => Promise<void>,
    private readonly intervalMs: number = 3000,
    private readonly onStatus?: (status: PollStatus) => void,
  ) {}

  start(): void {
    if (this.running) return;
    this.running = true;
    void this.loop();
  }

  stop(): void {
    this.running = false;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }

  /** One poll cycle; exposed so tests can drive the loop deterministically. */
  async pollOnce(): Promise<void> {
    try {
      await this.tick();
      this.status.degraded = false;
      this.status.authFailed = false;
      this.status.lastError = undefined;
    } catch (err) {
      this.status.degraded = true;
      const status = (err as { status?: number }).status;
      this.status.authFailed = status === 401;
      this.status.lastError = err instanceof Error ? err.message : String(err);
    }
    this.onStatus?.(this.status);
  }

  private async loop(): Promise<void> {
    while (this.running) {
      await this.pollOnce();
      if (!this.running) break;
      await new Promise<void>((resolve) => {
        this.timer = setTimeout(resolve, this.intervalMs);
      });
    }
  }
}
